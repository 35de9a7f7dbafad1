function repeat(s, n) {
    var out = "";
    var i = 0;
    while (i < n) {
        out = out + s;
        i = i + 1;
    }
    return out;
}

var ab = repeat("ab", 40);
var ba = repeat("ba", 40);
print(ab == ba);
print(ab == repeat("ab", 40));
print(repeat("x", 3) + "y");

function benchmarkRun() {
    var acc = "";
    var i = 0;
    while (i < 60) {
        acc = acc + repeat("ab", 10);
        i = i + 1;
    }
    return acc == repeat("ab", 600);
}
