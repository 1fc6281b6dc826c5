"""Command-line front end: `fa <group|span|lang|presburger|set|mt|demo> ...`.

Decision-style commands use the exit-code protocol: 0 for success or a true
decision, 1 for a false decision, 2 for usage errors, 3 for resource-cap
errors.  All results are also emitted as JSON (stdout or --out), with sorted
keys so identical inputs produce byte-identical reports.
"""

import argparse
import json
import re
import sys

from . import automata, autosets, presburger, spanning
from .autosets import AutomaticSet, And, Eq, Exists, InSet, Not, Or, Term
from .errors import CapExceeded
from .groups import group_from_json
from .modeltheory import EDPSet, edp_member, ladder_search, tpower_expansion_report
from .spanning import SpanningSet


def _emit(args, payload, exit_code=0):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return exit_code


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_group(args):
    return group_from_json(_load_json(args.group))


def _parse_digits(group, text):
    raw = json.loads(text)
    return [group.element_from_json(x) for x in raw]


def _parse_elem(group, text):
    return group.element_from_json(json.loads(text))


# -- workspace -------------------------------------------------------------


class Workspace:
    """Named bindings over one group and spanning set, stored as JSON."""

    def __init__(self, path):
        self.path = path
        data = _load_json(path)
        self.group = group_from_json(data["group"])
        self.span = SpanningSet.from_json(self.group, data["span"])
        self.data = data
        self._cache = {}

    def get(self, name):
        if name in self._cache:
            return self._cache[name]
        binding = self.data.get("bindings", {}).get(name)
        if binding is None:
            raise KeyError(f"no binding named {name!r}")
        if "set" in binding:
            aset = AutomaticSet.from_json(binding["set"])
        else:
            aset = eval_set_expr(self, binding["expr"])
        self._cache[name] = aset
        return aset

    def put(self, name, aset, expr=None):
        bindings = self.data.setdefault("bindings", {})
        stored = {"set": aset.to_json()}
        if expr:
            stored["expr"] = expr
        bindings[name] = stored
        self._cache[name] = aset

    def save(self):
        with open(self.path, "w") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True)
            fh.write("\n")


# -- set expressions ---------------------------------------------------------
#
#   S ::= NAME | lang(PATH) | cycle(ELEM [, DELTA]) | universe | empty
#       | translate(S, ELEM) | setof(VAR, FORMULA)
#       | S + S | S & S | S '|' S | !S | (S)


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "[":
            depth = 0
            j = i
            while j < len(text):
                if text[j] == "[":
                    depth += 1
                elif text[j] == "]":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            tokens.append(("elem", text[i : j + 1]))
            i = j + 1
            continue
        m = re.match(r"[A-Za-z_][A-Za-z_0-9]*", text[i:])
        if m:
            tokens.append(("word", m.group(0)))
            i += len(m.group(0))
            continue
        m = re.match(r"\d+", text[i:])
        if m:
            tokens.append(("int", m.group(0)))
            i += len(m.group(0))
            continue
        if c in "()+&|!,=*./-":
            tokens.append((c, c))
            i += 1
            continue
        raise ValueError(f"bad character {c!r} in expression")
    return tokens


class _ExprParser:
    def __init__(self, ws, text):
        self.ws = ws
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ValueError(f"expected {kind!r}, got {tok[1]!r}")
        return tok

    # precedence: | lowest, then +, then &, then unary
    def parse(self):
        out = self.parse_union()
        if self.peek()[0] is not None:
            raise ValueError(f"trailing input {self.peek()[1]!r}")
        return out

    def parse_union(self):
        lhs = self.parse_sum()
        while self.peek()[0] == "|":
            self.next()
            lhs = lhs.union(self.parse_sum())
        return lhs

    def parse_sum(self):
        lhs = self.parse_inter()
        while self.peek()[0] == "+":
            self.next()
            lhs = autosets.sparse_sum(lhs, self.parse_inter(), recheck=False)
        return lhs

    def parse_inter(self):
        lhs = self.parse_unary()
        while self.peek()[0] == "&":
            self.next()
            lhs = lhs.intersect(self.parse_unary())
        return lhs

    def parse_unary(self):
        kind, val = self.peek()
        if kind == "!":
            self.next()
            return self.parse_unary().complement()
        if kind == "(":
            self.next()
            inner = self.parse_union()
            self.expect(")")
            return inner
        if kind == "word":
            self.next()
            if val == "lang":
                self.expect("(")
                pieces = []
                while self.peek()[0] not in (")", None):
                    pieces.append(self.next()[1])
                path = "".join(pieces)
                self.expect(")")
                aut = automata.Automaton.from_json(_load_json(path))
                alphabet = [
                    self.ws.group.element_from_json(a) for a in aut.to_json()["alphabet"]
                ]
                renamed = automata.Automaton(
                    alphabet,
                    aut.n,
                    aut.initial,
                    aut.finish,
                    [
                        (q, alphabet[li], q2)
                        for (q, li), ts in aut.delta.items()
                        for q2 in ts
                    ],
                )
                return autosets.from_language(self.ws.span, renamed)
            if val == "cycle":
                self.expect("(")
                elem = self.ws.group.element_from_json(
                    json.loads(self.expect("elem")[1])
                )
                delta = 1
                if self.peek()[0] == ",":
                    self.next()
                    delta = int(self.expect("int")[1])
                self.expect(")")
                return autosets.f_cycle(self.ws.span, elem, delta)
            if val == "translate":
                self.expect("(")
                inner = self.parse_union()
                self.expect(",")
                elem = self.ws.group.element_from_json(
                    json.loads(self.expect("elem")[1])
                )
                self.expect(")")
                return autosets.translate(inner, elem)
            if val == "setof":
                self.expect("(")
                var = self.expect("word")[1]
                self.expect(",")
                body = self.parse_formula()
                self.expect(")")
                return autosets.compile_formula(self.ws.span, body, (var,))
            if val == "universe":
                return autosets.whole_group(self.ws.span)
            if val == "empty":
                return autosets.empty_set(self.ws.span)
            return self.ws.get(val)
        raise ValueError(f"unexpected token {val!r}")

    # formulas inside setof(...)
    def parse_formula(self):
        lhs = self.parse_formula_and()
        while self.peek()[0] == "|":
            self.next()
            lhs = Or((lhs, self.parse_formula_and()))
        return lhs

    def parse_formula_and(self):
        lhs = self.parse_formula_unary()
        while self.peek()[0] == "&":
            self.next()
            lhs = And((lhs, self.parse_formula_unary()))
        return lhs

    def parse_formula_unary(self):
        kind, val = self.peek()
        if kind == "!":
            self.next()
            return Not(self.parse_formula_unary())
        if kind == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if kind == "word" and val == "exists":
            self.next()
            var = self.expect("word")[1]
            self.expect(".")
            return Exists(var, self.parse_formula())
        return self.parse_atom()

    def parse_atom(self):
        kind, val = self.peek()
        # name(v1, v2, ..) is a membership atom when name is bound
        if kind == "word" and self.pos + 1 < len(self.toks) and self.toks[self.pos + 1][0] == "(":
            save = self.pos
            name = self.next()[1]
            if name != "exists":
                try:
                    aset = self.ws.get(name)
                except KeyError:
                    self.pos = save
                else:
                    self.expect("(")
                    vars_ = [self.expect("word")[1]]
                    while self.peek()[0] == ",":
                        self.next()
                        vars_.append(self.expect("word")[1])
                    self.expect(")")
                    return InSet(aset, tuple(vars_))
            else:
                self.pos = save
        lhs = self.parse_term()
        self.expect("=")
        rhs = self.parse_term()
        return Eq(lhs, rhs)

    def parse_term(self):
        out = self.parse_term_atom()
        while self.peek()[0] == "+":
            self.next()
            out = out + self.parse_term_atom()
        return out

    def parse_term_atom(self):
        g = self.ws.group
        kind, val = self.next()
        if kind == "elem":
            return Term.const_term(g, g.element_from_json(json.loads(val)))
        if kind == "int":
            self.expect("*")
            name = self.expect("word")[1]
            return Term.var(g, name).scale(int(val))
        if kind == "word":
            return Term.var(g, val)
        raise ValueError(f"bad term at {val!r}")


def eval_set_expr(ws, text):
    return _ExprParser(ws, text).parse()


# -- subcommand handlers -------------------------------------------------------


def cmd_group_show(args):
    g = _load_group(args)
    return _emit(args, {"group": g.to_json(), "quotient_size": g.quotient_size(1)})


def cmd_span_gate(args):
    g = _load_group(args)
    res = spanning.eigen_gate(g)
    payload = {
        "admits": res.admits,
        "r_hint": res.r_hint,
        "reason": res.reason,
        "witness": res.witness,
    }
    return _emit(args, payload, 0 if res.admits else 1)


def cmd_span_verify(args):
    g = _load_group(args)
    digits = _parse_digits(g, args.digits)
    res = spanning.verify_spanning(g, digits, args.power)
    payload = {"verified": res.ok}
    if not res.ok:
        payload["axiom"] = res.axiom
        payload["witness"] = [g.element_to_json(w) for w in res.witness]
    else:
        payload["spanning_set"] = res.spanning_set.to_json()
    return _emit(args, payload, 0 if res.ok else 1)


def cmd_span_lambda(args):
    g = _load_group(args)
    digits = _parse_digits(g, args.digits)
    res = spanning.verify_spanning(g, digits, args.power)
    if not res.ok:
        return _emit(args, {"error": f"digit set fails axiom {res.axiom}"}, 2)
    span = res.spanning_set
    elem = _parse_elem(g, args.elem)
    word = span.shortest_expansion(elem)
    return _emit(
        args,
        {
            "element": g.element_to_json(elem),
            "word": [g.element_to_json(a) for a in word],
            "length": len(word),
            "lambda": span.lambda_value(elem),
        },
    )


def cmd_lang_sparse(args):
    aut = automata.Automaton.from_json(_load_json(getattr(args, "in")))
    res = automata.is_sparse(aut)
    payload = {"sparse": res.sparse}
    if res.sparse:
        payload["degree"] = res.degree
        payload["terms"] = [t.to_json() for t in automata.sparse_decompose(aut)]
    else:
        payload["witness"] = {
            "u": list(res.witness[0]),
            "v": list(res.witness[1]),
            "w": list(res.witness[2]),
        }
    return _emit(args, payload, 0 if res.sparse else 1)


def cmd_lang_count(args):
    aut = automata.Automaton.from_json(_load_json(getattr(args, "in")))
    return _emit(args, {"upto": args.upto, "counts": aut.growth_profile(args.upto)})


def cmd_lang_parikh(args):
    aut = automata.Automaton.from_json(_load_json(getattr(args, "in")))
    return _emit(args, {"parikh": automata.parikh_image(aut).to_json()})


def cmd_presburger_decide(args):
    rel, vars_ = presburger.parse_formula(args.formula)
    payload = {"variables": list(vars_), "satisfiable": not rel.is_empty()}
    if args.enumerate is not None:
        payload["solutions_upto"] = sorted(
            list(v) for v in rel.tuples_upto(args.enumerate)
        )
    return _emit(args, payload, 0 if payload["satisfiable"] else 1)


def cmd_set_build(args):
    ws = Workspace(args.workspace)
    aset = eval_set_expr(ws, args.expr)
    ws.put(args.name, aset, expr=args.expr)
    ws.save()
    return _emit(args, {"name": args.name, "states": aset.dfa.n})


def cmd_set_member(args):
    ws = Workspace(args.workspace)
    aset = ws.get(args.name)
    elem = ws.group.element_from_json(json.loads(args.elem))
    ok = aset.member(elem)
    return _emit(args, {"member": ok}, 0 if ok else 1)


def cmd_set_enumerate(args):
    ws = Workspace(args.workspace)
    aset = ws.get(args.name)
    els = sorted(aset.elements(args.maxlen), key=ws.group.sort_key)
    return _emit(
        args,
        {"count": len(els), "elements": [ws.group.element_to_json(e) for e in els]},
    )


def cmd_set_sparse(args):
    ws = Workspace(args.workspace)
    aset = ws.get(args.name)
    res = autosets.is_f_sparse(aset)
    payload = {"sparse": res.sparse}
    if res.sparse:
        payload["degree"] = res.degree
        payload["terms"] = [t.to_json() for t in res.terms]
    else:
        payload["witness"] = {
            "u": [ws.group.element_to_json(a) for a in res.witness[0]],
            "v": [ws.group.element_to_json(a) for a in res.witness[1]],
            "w": [ws.group.element_to_json(a) for a in res.witness[2]],
        }
    return _emit(args, payload, 0 if res.sparse else 1)


def cmd_set_kernel(args):
    ws = Workspace(args.workspace)
    aset = ws.get(args.name)
    kernel = autosets.kernel_of(aset)
    round_trip = autosets.from_kernel(kernel).same_set(aset)
    payload = kernel.to_json()
    payload["round_trip_equal"] = round_trip
    return _emit(args, payload)


def cmd_mt_ladder(args):
    ws = Workspace(args.workspace)
    aset = ws.get(args.name)
    res = ladder_search(aset, args.n, mode=args.mode, bound=args.bound)
    payload = {"found": res.found, "n": args.n, "mode": args.mode, "bound": res.bound}
    if res.found and res.ladder:
        payload["a"] = [ws.group.element_to_json(a) for a in res.ladder.a_elements]
        payload["b"] = [ws.group.element_to_json(b) for b in res.ladder.b_elements]
    if res.note:
        payload["note"] = res.note
    return _emit(args, payload, 0 if res.found else 1)


def cmd_mt_edp_member(args):
    e = EDPSet.from_json(_load_json(args.edp))
    elem = e.group.element_from_json(json.loads(args.elem))
    ok = edp_member(e, elem)
    return _emit(args, {"member": ok}, 0 if ok else 1)


def cmd_demo_polysnip(args):
    report = tpower_expansion_report(args.p, args.dmax)
    chosen = report.get("encoding_chosen")
    ok = chosen is not None and report["encodings"][chosen]["all_pass"]
    return _emit(args, report, 0 if ok else 1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fa", description="automatic subsets of abelian groups"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group")
    gsub = p.add_subparsers(dest="sub", required=True)
    q = gsub.add_parser("show")
    q.add_argument("--group", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_group_show)

    p = sub.add_parser("span")
    ssub = p.add_subparsers(dest="sub", required=True)
    q = ssub.add_parser("gate")
    q.add_argument("--group", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_span_gate)
    q = ssub.add_parser("verify")
    q.add_argument("--group", required=True)
    q.add_argument("--digits", required=True)
    q.add_argument("--power", type=int, default=1)
    q.add_argument("--out")
    q.set_defaults(func=cmd_span_verify)
    q = ssub.add_parser("lambda")
    q.add_argument("--group", required=True)
    q.add_argument("--digits", required=True)
    q.add_argument("--power", type=int, default=1)
    q.add_argument("--elem", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_span_lambda)

    p = sub.add_parser("lang")
    lsub = p.add_subparsers(dest="sub", required=True)
    for name, func, extra in (
        ("sparse", cmd_lang_sparse, ()),
        ("count", cmd_lang_count, ("upto",)),
        ("parikh", cmd_lang_parikh, ()),
    ):
        q = lsub.add_parser(name)
        q.add_argument("--in", required=True)
        if "upto" in extra:
            q.add_argument("--upto", type=int, default=20)
        q.add_argument("--out")
        q.set_defaults(func=func)

    p = sub.add_parser("presburger")
    psub = p.add_subparsers(dest="sub", required=True)
    q = psub.add_parser("decide")
    q.add_argument("--formula", required=True)
    q.add_argument("--enumerate", type=int)
    q.add_argument("--out")
    q.set_defaults(func=cmd_presburger_decide)

    p = sub.add_parser("set")
    setsub = p.add_subparsers(dest="sub", required=True)
    q = setsub.add_parser("build")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--expr", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_set_build)
    q = setsub.add_parser("member")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--elem", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_set_member)
    q = setsub.add_parser("enumerate")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--maxlen", type=int, default=6)
    q.add_argument("--out")
    q.set_defaults(func=cmd_set_enumerate)
    q = setsub.add_parser("sparse")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_set_sparse)
    q = setsub.add_parser("kernel")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_set_kernel)

    p = sub.add_parser("mt")
    msub = p.add_subparsers(dest="sub", required=True)
    q = msub.add_parser("ladder")
    q.add_argument("--workspace", required=True)
    q.add_argument("--name", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mode", choices=("exact", "bounded"), default="bounded")
    q.add_argument("--bound", type=int)
    q.add_argument("--out")
    q.set_defaults(func=cmd_mt_ladder)
    q = msub.add_parser("edp")
    esub = q.add_subparsers(dest="subsub", required=True)
    q2 = esub.add_parser("member")
    q2.add_argument("--edp", required=True)
    q2.add_argument("--elem", required=True)
    q2.add_argument("--out")
    q2.set_defaults(func=cmd_mt_edp_member)

    p = sub.add_parser("demo")
    dsub = p.add_subparsers(dest="sub", required=True)
    q = dsub.add_parser("polysnip")
    q.add_argument("--p", type=int, default=7)
    q.add_argument("--dmax", type=int, default=12)
    q.add_argument("--out")
    q.set_defaults(func=cmd_demo_polysnip)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(
            json.dumps(
                {"error": str(exc), "payload": getattr(exc, "payload", {})},
                sort_keys=True,
            ),
            file=sys.stderr,
        )
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(json.dumps({"error": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
