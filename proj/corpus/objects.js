// Method-call-heavy vector arithmetic over typed shapes.
function Vec(x, y) {
    this.x = x;
    this.y = y;
    this.dot = function vdot(o) { return this.x * o.x + this.y * o.y; };
    this.scale = function vscale(k) { this.x = this.x * k; this.y = this.y * k; };
}

function norm2(v) {
    return v.dot(v);
}

var total = 0;
var i = 1;
while (i <= 50) {
    var v = new Vec(i, i + 1);
    var w = new Vec(2, 3);
    w.scale(i);
    total = total + norm2(v) + v.dot(w);
    i = i + 1;
}
print(total);

function benchmarkRun() {
    var t = 0;
    var j = 1;
    while (j <= 50) {
        var v = new Vec(j, 2);
        t = t + norm2(v);
        j = j + 1;
    }
    return t;
}
