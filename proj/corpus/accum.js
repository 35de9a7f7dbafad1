// Accumulator object with two methods. The shape of `a` records the
// identity of both methods, so `a.add(5)` has a known callee.
function Accum() {
    this.n = 0;
    this.add = function id1(x) { this.n += x; };
    this.sub = function id2(x) { this.n -= x; };
}

var a = new Accum();
a.add(5);
print(a.n);
a.sub(2);
print(a.n);

function benchmarkRun() {
    var b = new Accum();
    var i = 0;
    while (i < 200) {
        b.add(i);
        b.sub(1);
        i = i + 1;
    }
    return b.n;
}
