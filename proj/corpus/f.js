// Recursive accumulator: the canonical block-versioning example. With
// intraprocedural versioning two dynamic tag tests remain per activation
// (the parameter at ==, the call result at +); interprocedural
// specialization removes both.
function f(n) {
    if (n == 0)
        return 0;
    else
        return n + f(n-1);
}

print(f(100));

function benchmarkRun() {
    return f(100);
}
