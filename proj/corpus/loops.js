// Integer loop kernel in the 3bits-bytes spirit: digit shuffling with
// division and modulo.
function shuffle(n) {
    var acc = 0;
    var i = 1;
    while (i <= n) {
        var d = i;
        while (d > 0) {
            acc = acc + d % 10;
            d = (d - d % 10) / 10;
        }
        i = i + 1;
    }
    return acc;
}

print(shuffle(300));

function benchmarkRun() {
    return shuffle(300);
}
