// Feeds one join block eight distinct incoming type contexts, exceeding
// the per-block version cap; the block must fall back to its single
// generic version while the first five contexts keep specialized code.
function pick(k) {
    var x = 0;
    if (k == 0) x = 1;
    if (k == 1) x = 1.5;
    if (k == 2) x = "s";
    if (k == 3) x = true;
    if (k == 4) x = null;
    if (k == 5) x = { v: 1 };
    if (k == 6) x = [1];
    if (k == 7) x = print;
    print(x);
    return 0;
}

var i = 0;
while (i < 8) {
    pick(i);
    i = i + 1;
}

function benchmarkRun() {
    var j = 0;
    while (j < 8) {
        pick(j);
        j = j + 1;
    }
    return j;
}
