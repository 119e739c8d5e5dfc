var RT = (function () {
  var nil = {$: 0};
  function cons(h, t) { return {$: 1, $0: h, $1: t}; }
  function fail(code, detail) { throw new Error(code + ": " + detail); }
  function isInt(x) { return Number.isInteger(x); }
  function curry2(f) { return function (a) { return function (b) { return f(a, b); }; }; }
  function curry3(f) { return function (a) { return function (b) { return function (c) { return f(a, b, c); }; }; }; }
  function toArray(l) { var out = []; while (l.$ === 1) { out.push(l.$0); l = l.$1; } return out; }
  function fromArray(xs) { var l = nil; var i = xs.length; while (i > 0) { i = i - 1; l = cons(xs[i], l); } return l; }
  function nonEmpty(l, name) { if (l.$ !== 1) { fail("empty-list", name + " of an empty list"); } return l; }
  function eq(a, b) {
    if (a !== null && typeof a === "object") {
      while (a.$ === 1 && b.$ === 1) { if (!eq(a.$0, b.$0)) { return false; } a = a.$1; b = b.$1; }
      return a.$ === b.$;
    }
    return a === b;
  }
  function idiv(a, b) { if (b === 0) { fail("div-zero", "integer division by zero"); } return Math.trunc(a / b); }
  function imod(a, b) { if (b === 0) { fail("div-zero", "integer division by zero"); } return a % b; }
  return {
    add: curry2(function (a, b) { return a + b; }),
    sub: curry2(function (a, b) { return a - b; }),
    mul: curry2(function (a, b) { return a * b; }),
    div: curry2(function (a, b) { return isInt(a) && isInt(b) ? idiv(a, b) : a / b; }),
    mod: curry2(function (a, b) { return isInt(a) && isInt(b) ? imod(a, b) : a % b; }),
    neg: function (a) { return -a; },
    lt: curry2(function (a, b) { return a < b; }),
    le: curry2(function (a, b) { return a <= b; }),
    gt: curry2(function (a, b) { return a > b; }),
    ge: curry2(function (a, b) { return a >= b; }),
    eq: curry2(eq),
    ne: curry2(function (a, b) { return !eq(a, b); }),
    and: curry2(function (a, b) { return a && b; }),
    or: curry2(function (a, b) { return a || b; }),
    not: function (a) { return !a; },
    toFloat: function (a) { return a; },
    toInt: function (a) { return Math.trunc(a); },
    sqrt: function (a) { return Math.sqrt(a); },
    abs: function (a) { return Math.abs(a); },
    min: curry2(function (a, b) { return Math.min(a, b); }),
    max: curry2(function (a, b) { return Math.max(a, b); }),
    cons: curry2(cons),
    head: function (l) { return nonEmpty(l, "head").$0; },
    tail: function (l) { return nonEmpty(l, "tail").$1; },
    isEmpty: function (l) { return l.$ === 0; },
    length: function (l) { return toArray(l).length; },
    append: curry2(function (a, b) { return fromArray(toArray(a).concat(toArray(b))); }),
    map: curry2(function (f, l) { return fromArray(toArray(l).map(function (x) { return f(x); })); }),
    filter: curry2(function (p, l) { return fromArray(toArray(l).filter(function (x) { return p(x); })); }),
    foldl: curry3(function (f, acc, l) { return toArray(l).reduce(function (a, x) { return f(a)(x); }, acc); }),
    sum: function (l) { return toArray(l).reduce(function (a, x) { return a + x; }, 0); },
    range: curry2(function (lo, hi) { var xs = []; var i = lo; while (i <= hi) { xs.push(i); i = i + 1; } return fromArray(xs); }),
    rpc: function (name, args) { return fail("unavailable", "no transport installed for " + name + "/" + args.length); }
  };
})();
