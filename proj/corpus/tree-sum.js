// Binary tree traversal. Leaf nodes and internal nodes get two distinct
// typed shapes (left/right null vs. object); entry point specialization
// creates one version of sum per argument tag, and continuation
// specialization removes the result tag tests of the recursive calls.
function sum(tree) {
    if (tree == null)
        return 0;
    else
        return sum(tree.left) +
               sum(tree.right) +
               tree.val;
}

function makeTree(depth) {
    if (depth == 0)
        return null;
    else
        return { val: depth,
                 left: makeTree(depth-1),
                 right: makeTree(depth-1)
               };
}

var root = makeTree(8);
if (sum(root) != 502)
    throw Error('error');

function benchmarkRun() {
    return sum(root);
}
