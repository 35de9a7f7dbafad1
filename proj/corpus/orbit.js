// Float-heavy kinematics: one body integrated under a fixed force.
function Body(x, y) {
    this.x = x;
    this.y = y;
    this.vx = 0.0;
    this.vy = 0.0;
}

function step(b, dt) {
    var ax = 0.0 - b.x * 0.31;
    var ay = 0.0 - b.y * 0.31;
    b.vx = b.vx + ax * dt;
    b.vy = b.vy + ay * dt;
    b.x = b.x + b.vx * dt;
    b.y = b.y + b.vy * dt;
    return b.x * b.x + b.y * b.y;
}

function simulate(iters) {
    var b = new Body(1.0, 0.5);
    var r = 0.0;
    var i = 0;
    while (i < iters) {
        r = r + step(b, 0.01);
        i = i + 1;
    }
    return r;
}

print(simulate(500) > 0.0);

function benchmarkRun() {
    return simulate(500);
}
