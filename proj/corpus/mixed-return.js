// A function that returns int32 twenty times and then a string. The first
// compiled return memorizes int32 and the call continuation specializes on
// it; compiling the string return must invalidate that continuation before
// the string ever reaches the caller.
function flip(i, limit) {
    if (i < limit)
        return i * 2;
    return "done";
}

var K = 20;
var i = 0;
var last = flip(0, K);
while (i <= K) {
    last = flip(i, K);
    i = i + 1;
}
print(last);

function benchmarkRun() {
    var j = 0;
    var r = flip(0, 10);
    while (j <= 10) {
        r = flip(j, 10);
        j = j + 1;
    }
    return r;
}
