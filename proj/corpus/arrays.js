// Arrays are untyped black boxes: every element read feeds tag-test
// cascades downstream.
function fill(n) {
    var a = [];
    var i = 0;
    while (i < n) {
        a[i] = i * i % 97;
        i = i + 1;
    }
    return a;
}

function total(a) {
    var s = 0;
    var i = 0;
    while (i < a.length) {
        s = s + a[i];
        i = i + 1;
    }
    return s;
}

var data = fill(200);
print(total(data));
print(data.length);

function benchmarkRun() {
    return total(fill(200));
}
