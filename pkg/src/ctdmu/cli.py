"""Command-line front end: ``ctdmu <command> ...``.

Every command builds a result document (printed with ``--json``) and a
human rendering.  Exit codes: 0 ok, 2 bad input, 3 failed ``--assert``.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import automata, games, model, ordeval, regress, semantics, syntax
from .ordinal import INF, Ordinal, OrdinalError, format_ordinal, parse_ordinal

EXIT_OK, EXIT_INPUT, EXIT_ASSERT = 0, 2, 3


class InputError(Exception):
    pass


@dataclass
class CliResult:
    code: int = EXIT_OK
    doc: dict = field(default_factory=dict)
    text: str = ""
    as_json: bool = False

    @property
    def verdict(self):
        return self.doc.get("verdict")


# -- regular expressions -----------------------------------------------------

class _Regex:
    """Thompson construction.  Letters are single characters or ``{name}``;
    ``.`` is any action, postfix ``* + ?``, ``|`` for choice, ``()`` grouping."""

    def __init__(self, text, alphabet):
        self.text = text
        self.i = 0
        self.alphabet = tuple(alphabet)
        self.n = 0
        self.trans = []  # (src, letter or None, dst)

    def new(self):
        self.n += 1
        return self.n - 1

    def peek(self):
        return self.text[self.i] if self.i < len(self.text) else None

    def parse(self):
        frag = self.alt()
        if self.peek() is not None:
            raise InputError(f"regex: unexpected {self.peek()!r} at {self.i}")
        return frag

    def alt(self):
        frags = [self.cat()]
        while self.peek() == "|":
            self.i += 1
            frags.append(self.cat())
        if len(frags) == 1:
            return frags[0]
        s, t = self.new(), self.new()
        for a, b in frags:
            self.trans += [(s, None, a), (b, None, t)]
        return s, t

    def cat(self):
        s = self.new()
        cur = s
        while self.peek() not in (None, "|", ")"):
            a, b = self.post()
            self.trans.append((cur, None, a))
            cur = b
        return s, cur

    def post(self):
        a, b = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.text[self.i]
            self.i += 1
            s, t = self.new(), self.new()
            self.trans += [(s, None, a), (b, None, t)]
            if op in ("*", "?"):
                self.trans.append((s, None, t))
            if op in ("*", "+"):
                self.trans.append((b, None, a))
            a, b = s, t
        return a, b

    def atom(self):
        c = self.peek()
        if c is None:
            raise InputError("regex: unexpected end")
        if c == "(":
            self.i += 1
            frag = self.alt()
            if self.peek() != ")":
                raise InputError("regex: missing )")
            self.i += 1
            return frag
        if c in "*+?)|":
            raise InputError(f"regex: unexpected {c!r} at {self.i}")
        if c == "{":
            j = self.text.find("}", self.i)
            if j < 0:
                raise InputError("regex: missing }")
            letters = [self.text[self.i + 1:j]]
            self.i = j + 1
        else:
            self.i += 1
            letters = list(self.alphabet) if c == "." else [c]
        s, t = self.new(), self.new()
        for x in letters:
            if x not in self.alphabet:
                raise InputError(f"regex: {x!r} is not in the alphabet {list(self.alphabet)}")
            self.trans.append((s, x, t))
        return s, t


def regex_to_nfa(text: str, alphabet) -> syntax.Nfa:
    r = _Regex(text.replace(" ", ""), alphabet)
    start, final = r.parse()
    eps = {}
    for s, x, t in r.trans:
        if x is None:
            eps.setdefault(s, set()).add(t)

    def closure(q):
        out, stack = {q}, [q]
        while stack:
            for t in eps.get(stack.pop(), ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return out

    states = list(range(r.n))
    cl = {q: closure(q) for q in states}
    trans = set()
    for q in states:
        for p in cl[q]:
            for s, x, t in r.trans:
                if s == p and x is not None:
                    trans.add((str(q), x, str(t)))
    accepting = {str(q) for q in states if final in cl[q]}
    # keep states reachable from the start that can still reach acceptance
    live, stack = {str(start)}, [str(start)]
    while stack:
        q = stack.pop()
        for s, _, t in trans:
            if s == q and t not in live:
                live.add(t)
                stack.append(t)
    useful = set(accepting) & live
    grew = True
    while grew:
        grew = False
        for s, _, t in trans:
            if s in live and t in useful and s not in useful:
                useful.add(s)
                grew = True
    keep = [str(q) for q in states if str(q) in useful or q == start]
    trans = {(s, x, t) for s, x, t in trans if s in useful and t in useful}
    return syntax.Nfa(tuple(keep), tuple(alphabet), frozenset({str(start)}),
                      frozenset(accepting & useful), frozenset(trans))


# -- input helpers -------------------------------------------------------------

def _formula(args) -> syntax.Formula:
    text = args.formula
    if getattr(args, "formula_file", None):
        with open(args.formula_file) as fh:
            text = fh.read()
    if text is None:
        raise InputError("no formula given (-f)")
    return syntax.parse(text)


def _model(args):
    if not args.model:
        raise InputError("no model given (-m)")
    m, val = model.load(args.model)
    for item in getattr(args, "set", None) or []:
        name, _, pts = item.partition("=")
        val[name.strip()] = frozenset(p for p in pts.split(",") if p)
    model.check_valuation(m, val)
    return m, val


def _automaton(args):
    with open(args.automaton) as fh:
        return automata.from_json(json.load(fh))


def _set_text(pts) -> str:
    return "{" + ",".join(pts) + "}"


def _ordered(m, pts):
    return [p for p in m.points if p in pts]


# -- commands ----------------------------------------------------------------

def cmd_check(args) -> CliResult:
    f = _formula(args)
    m, val = _model(args)
    if args.point is not None and args.point not in m.index:
        raise InputError(f"unknown point {args.point!r}")
    doc = {"formula": syntax.to_text(f)}
    engines = {}
    if args.via == "eval" or args.cross_check:
        engines["eval"] = semantics.evaluate(f, m, val)
    if args.via == "game" or args.cross_check:
        a = automata.from_formula(f, allow_successor=True)
        engines["game"] = games.language(a, m, val, _truncation(args))
    main = engines[args.via]
    if args.point is not None:
        doc["point"] = args.point
        doc["verdict"] = "true" if args.point in main else "false"
    else:
        doc["set"] = _ordered(m, main)
        doc["verdict"] = _set_text(doc["set"])
    lines = [doc["verdict"]]
    if args.cross_check:
        doc["engines"] = {k: _ordered(m, v) for k, v in engines.items()}
        doc["agree"] = engines["eval"] == engines["game"]
        lines.append("eval and game agree" if doc["agree"] else
                     f"MISMATCH eval={_set_text(doc['engines']['eval'])} game={_set_text(doc['engines']['game'])}")
    return CliResult(EXIT_OK, doc, "\n".join(lines))


def _truncation(args):
    t = getattr(args, "truncation", "auto")
    if t in (None, "auto"):
        return "auto"
    try:
        n = int(t)
    except ValueError:
        raise InputError(f"truncation must be 'auto' or a natural, not {t!r}") from None
    if n < 1:
        raise InputError("truncation must be positive")
    return n


def _game_setup(args):
    if args.automaton:
        a = _automaton(args)
    else:
        a = automata.from_formula(_formula(args), allow_successor=True)
    if args.model:
        m, val = _model(args)
        g = games.build_semantic_game(a, m, val)
    else:
        g = games.standalone_game(a)
        m = g.meta["model"]
    return a, m, g


def _start_config(args, a, m, res):
    p = args.start if args.start is not None else m.points[-1]
    if p not in m.index:
        raise InputError(f"unknown point {p!r}")
    state = args.state or a.initial
    if (p, state) not in res.game.rank:
        raise InputError(f"unknown state {state!r}")
    ctr = list(res.initial_ctr)
    for item in args.ctr or []:
        r, _, v = item.partition(":")
        try:
            r = int(r)
            k = res.game.nonstandard.index(r)
            val = parse_ordinal(v)
        except (ValueError, OrdinalError):
            raise InputError(f"bad counter assignment {item!r} (want rank:ordinal)") from None
        if val is INF or not val.is_finite:
            val = Ordinal.of(res.bounds[r])
        if int(val) > res.bounds[r]:
            raise InputError(f"counter {int(val)} exceeds the truncation bound {res.bounds[r]} of rank {r}")
        ctr[k] = val
    return games.Configuration((p, state), tuple(ctr), games.POSITIONAL)


def cmd_game(args) -> CliResult:
    a, m, g = _game_setup(args)
    trunc = _truncation(args)
    if args.action == "solve":
        res = games.solve(g, trunc)
        winners = {p: str(res.winner_at((p, a.initial))) for p in m.points}
        doc = {"bounds": {str(r): b for r, b in res.bounds.items()},
               "initial_state": a.initial,
               "winners": winners,
               "eve_wins": _ordered(m, {p for p, w in winners.items() if w == "Eve"})}
        doc["verdict"] = _set_text(doc["eve_wins"])
        lines = [f"bounds {doc['bounds'] or '{}'}"]
        lines += [f"({p},{a.initial}) {w}" for p, w in winners.items()]
        if args.strategy:
            strat = sorted((_conf_text(res.game, c), _conf_text(res.game, d)) for c, d in res.strategy.items())
            doc["strategy"] = [{"from": c, "to": d} for c, d in strat]
            lines += [f"{c} -> {d}" for c, d in strat]
        return CliResult(EXIT_OK, doc, "\n".join(lines))
    res0 = games.solve(g, trunc)
    start = _start_config(args, a, m, res0)
    res = games.solve(g, trunc, extra=[start]) if start not in res0.winner else res0
    if args.action == "trace":
        lines = games.trace(res, start, args.max_steps)
        doc = {"start": _conf_text(res.game, start), "lines": lines,
               "winner": str(res.winner[start]), "verdict": str(res.winner[start])}
        return CliResult(EXIT_OK, doc, "\n".join(lines))
    return _play(args, res, start)


def _conf_text(g, c) -> str:
    return f"{c.mode} {games.position_text(c.position)} {games.ctr_text(g, c.ctr)}"


def _play(args, res, start) -> CliResult:
    g = res.game
    human = automata.Player.E if args.side == "eve" else automata.Player.A
    out = sys.stdout
    log = []

    def say(line):
        log.append(line)
        if not args.json:
            print(line, file=out, flush=True)

    say(f"you play {human}; initial counters {res.bounds or '{}'} (infinite ones truncated)")
    c = start
    seen = {}
    history = []
    while True:
        if c in seen:
            loop = history[seen[c]:]
            top = max(g.rank[x.position] for x in loop)
            loser = g.rank_owner(top)
            say(f"configuration repeats: highest rank {top} belongs to {loser}, {loser.opponent} wins")
            winner = loser.opponent
            break
        seen[c] = len(history)
        history.append(c)
        who = games.mover(g, c)
        moves = games.legal_moves(g, c)
        say(f"{c.mode} | {games.position_text(c.position)} | ctr {games.ctr_text(g, c.ctr)} | {who}")
        if not moves:
            say(f"{who} is stuck: {who.opponent} wins")
            winner = who.opponent
            break
        countdown = c.mode == games.COUNTDOWN and not g.ranks[g.rank[c.position]].standard
        if who is human and len(moves) > 1:
            nxt = _ask(moves, c, g, countdown, say, quiet=args.json)
            if nxt is None:
                return CliResult(EXIT_INPUT, {"log": log, "error": "input ended"}, "error: input ended")
        elif who is human:
            nxt = moves[0]
            say(f"forced: -> {_move_text(g, nxt, c.mode)}")
        else:
            nxt = res.strategy.get(c) or (moves[-1] if countdown else moves[0])
            if who is not human:
                say(f"engine: -> {_move_text(g, nxt, c.mode)}")
        c = nxt
    doc = {"log": log, "winner": str(winner), "verdict": str(winner)}
    return CliResult(EXIT_OK, doc, "")


def _move_text(g, c, mode):
    return f"ctr {games.ctr_text(g, c.ctr)}" if mode == games.COUNTDOWN else games.position_text(c.position)


def _ask(moves, c, g, countdown, say, quiet=False):
    if countdown:
        bound = c.ctr[g.nonstandard.index(g.rank[c.position])]
        prompt = f"choose a counter value below {format_ordinal(bound)}:"
    else:
        opts = ", ".join(f"{i}: {games.position_text(m.position)}" for i, m in enumerate(moves))
        prompt = f"choose a move [{opts}]:"
    while True:
        if not quiet:
            print(prompt, flush=True)
        line = sys.stdin.readline()
        if not line:
            say("input ended")
            return None
        try:
            if countdown:
                return games.step(g, c, parse_ordinal(line.strip()))
            return games.step(g, c, int(line.strip()))
        except (ValueError, games.GameError, OrdinalError) as e:
            say(f"illegal move: {e}")


def cmd_translate(args) -> CliResult:
    if args.to_formula:
        f = automata.to_formula(_automaton(args))
        text = syntax.to_text(f)
        return CliResult(EXIT_OK, {"formula": text}, text)
    a = automata.from_formula(_formula(args), allow_successor=args.allow_successor)
    doc = automata.to_json(a)
    return CliResult(EXIT_OK, {"automaton": doc}, json.dumps(doc, indent=2))


def _formula_cmd(fn):
    def run(args):
        g = fn(_formula(args))
        text = syntax.to_text(g)
        return CliResult(EXIT_OK, {"formula": text}, text)
    return run


def cmd_analyze(args) -> CliResult:
    f = _formula(args)
    r = syntax.analyze(f)
    doc = {"free_vars": sorted(r.free_vars), "is_sentence": r.is_sentence, "is_scalar": r.is_scalar,
           "is_guarded": r.is_guarded, "is_positive_countdown": r.is_positive_countdown,
           "nesting": r.nesting, "size": syntax.size(f)}
    return CliResult(EXIT_OK, doc, "\n".join(f"{k}: {v}" for k, v in doc.items()))


def cmd_bound(args) -> CliResult:
    b = ordeval.stabilization_bound(_formula(args), args.t_max)
    return CliResult(EXIT_OK, {"bound": format_ordinal(b), "verdict": format_ordinal(b)}, format_ordinal(b))


def cmd_ordeval(args) -> CliResult:
    f = _formula(args)
    h = ordeval.parse_height(args.height)
    mdl = ordeval.OrdinalModel(h)
    val = {}
    for item in args.val or []:
        name, _, text = item.partition("=")
        val[name.strip()] = ordeval.parse_interval_set(text, h)
    s = ordeval.eval_ordinal(f, mdl, val)
    doc = {"height": str(mdl), "set": [[ordeval._text(lo), ordeval._text(hi)] for lo, hi in s.intervals],
           "verdict": str(s)}
    return CliResult(EXIT_OK, doc, str(s))


def cmd_gen(args) -> CliResult:
    if args.kind == "lasso":
        m = model.build_lasso(args.prefix, args.loop)
    elif args.kind == "fig1":
        m = model.build_figure1(args.n)
    else:
        acts = [x for x in args.actions.split(",") if x]
        m = model.random_lts(args.seed, args.points, acts, args.density)
    doc = model.to_json(m)
    text = json.dumps(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    return CliResult(EXIT_OK, {"model": doc}, text)


def cmd_sat(args) -> CliResult:
    f = _formula(args)
    r = semantics.sat_search_bounded(f, args.max_points)
    doc = {"verdict": "sat" if r.satisfiable else "unsat", "max_points": r.max_points}
    if r.satisfiable:
        doc["model"] = model.to_json(r.model)
        doc["point"] = r.point
        text = f"sat at {r.point} in {json.dumps(doc['model'])}"
    else:
        text = f"no model with at most {r.max_points} points"
        if r.note:
            doc["note"] = r.note
            text += f"\n{r.note}"
    return CliResult(EXIT_OK, doc, text)


def cmd_regex(args) -> CliResult:
    target = syntax.parse(args.target)
    alphabet = [x for x in args.alphabet.split(",") if x]
    nfa = regex_to_nfa(args.regex, alphabet)
    f = syntax.regex_diamond(nfa, target, args.mode)
    text = syntax.to_text(f)
    return CliResult(EXIT_OK, {"formula": text}, text)


def cmd_regress(args) -> CliResult:
    only = {int(x) for x in args.only.split(",")} if args.only else None
    checks = regress.run(only, args.seed)
    ok = all(c.passed for c in checks)
    doc = {"checks": [{"number": c.number, "name": c.name, "passed": c.passed, "detail": c.detail}
                      for c in checks], "verdict": "pass" if ok else "fail"}
    return CliResult(EXIT_OK, doc, "\n".join(c.line() for c in checks))


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the result document as JSON")
    common.add_argument("--assert", dest="expect", metavar="VERDICT",
                        help="exit with code 3 unless the verdict equals VERDICT")
    fopt = argparse.ArgumentParser(add_help=False)
    fopt.add_argument("-f", "--formula")
    fopt.add_argument("--formula-file")
    mopt = argparse.ArgumentParser(add_help=False)
    mopt.add_argument("-m", "--model")
    mopt.add_argument("--set", action="append", metavar="X=P,Q", help="add or override a valuation entry")

    p = argparse.ArgumentParser(prog="ctdmu", description="Countdown mu-calculus workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common, fopt, mopt], help="model checking")
    c.add_argument("-p", "--point")
    c.add_argument("--via", choices=("eval", "game"), default="eval")
    c.add_argument("--cross-check", action="store_true")
    c.add_argument("--truncation", default="auto")
    c.set_defaults(run=cmd_check)

    g = sub.add_parser("game", parents=[common, fopt, mopt], help="semantic and standalone games")
    g.add_argument("action", choices=("solve", "trace", "play"))
    g.add_argument("-a", "--automaton")
    g.add_argument("--start", help="start point (default: last point)")
    g.add_argument("--state", help="start state (default: initial)")
    g.add_argument("--ctr", action="append", metavar="RANK:ORD", help="start counter value")
    g.add_argument("--truncation", default="auto")
    g.add_argument("--strategy", action="store_true", help="dump the winning strategies")
    g.add_argument("--max-steps", type=int, default=200)
    g.add_argument("--side", choices=("eve", "adam"), default="adam", help="your side in play")
    g.set_defaults(run=cmd_game)

    t = sub.add_parser("translate", parents=[common, fopt], help="formula <-> automaton")
    mode = t.add_mutually_exclusive_group(required=True)
    mode.add_argument("--to-automaton", action="store_true")
    mode.add_argument("--to-formula", action="store_true")
    t.add_argument("-a", "--automaton")
    t.add_argument("--allow-successor", action="store_true",
                   help="keep successor bounds as direct finite counters")
    t.set_defaults(run=cmd_translate)

    for name, fn, hlp in (("guard", automata.guard, "equivalent guarded formula"),
                          ("dual", syntax.dualize, "negation dual"),
                          ("hat", syntax.hat_transform, "replace every bound by inf")):
        s = sub.add_parser(name, parents=[common, fopt], help=hlp)
        s.set_defaults(run=_formula_cmd(fn))

    s = sub.add_parser("analyze", parents=[common, fopt], help="formula report")
    s.set_defaults(run=cmd_analyze)

    s = sub.add_parser("bound", parents=[common, fopt], help="stabilization bound")
    s.add_argument("--t-max", type=int, default=2)
    s.set_defaults(run=cmd_bound)

    s = sub.add_parser("ordeval", parents=[common, fopt], help="evaluate on an ordinal model")
    s.add_argument("--height", default="w1")
    s.add_argument("--val", action="append", metavar="X=[a,b) u ...")
    s.set_defaults(run=cmd_ordeval)

    s = sub.add_parser("gen", parents=[common], help="model generators")
    gsub = s.add_subparsers(dest="kind", required=True)
    x = gsub.add_parser("lasso", parents=[common])
    x.add_argument("prefix")
    x.add_argument("loop")
    x = gsub.add_parser("fig1", parents=[common])
    x.add_argument("n", type=int)
    x = gsub.add_parser("random", parents=[common])
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--points", type=int, default=4)
    x.add_argument("--actions", default="a,b")
    x.add_argument("--density", type=float, default=0.3)
    for q in gsub.choices.values():
        q.add_argument("-o", "--output")
    s.set_defaults(run=cmd_gen)

    s = sub.add_parser("sat", parents=[common, fopt], help="bounded satisfiability search")
    s.add_argument("--max-points", type=int, default=2)
    s.set_defaults(run=cmd_sat)

    s = sub.add_parser("regex", parents=[common], help="compile <L>target for a regular expression L")
    s.add_argument("-r", "--regex", required=True)
    s.add_argument("-t", "--target", default="tt")
    s.add_argument("--alphabet", default="a,b")
    s.add_argument("--mode", choices=("diamond", "box"), default="diamond")
    s.set_defaults(run=cmd_regex)

    s = sub.add_parser("regress", parents=[common], help="run the acceptance suites")
    s.add_argument("--only", help="comma-separated check numbers")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(run=cmd_regress)
    return p


_INPUT_ERRORS = (InputError, OSError, json.JSONDecodeError, ValueError, KeyError,
                 semantics.EvalError, ordeval.LimitUndetected)


def run(argv=None) -> CliResult:
    args = build_parser().parse_args(argv)
    try:
        res = args.run(args)
    except _INPUT_ERRORS as e:
        msg = str(e) if not isinstance(e, KeyError) else f"missing {e}"
        return CliResult(EXIT_INPUT, {"error": msg}, f"error: {msg}", args.json)
    res.as_json = args.json
    if args.expect is not None and res.code == EXIT_OK:
        got = str(res.verdict).replace(" ", "").lower()
        want = args.expect.replace(" ", "").lower()
        res.doc["assert"] = {"expected": args.expect, "ok": got == want}
        if got != want:
            res.code = EXIT_ASSERT
            res.text += f"\nassertion failed: expected {args.expect}, got {res.verdict}"
    return res


def main(argv=None) -> int:
    try:
        res = run(argv)
    except SystemExit as e:  # argparse usage errors
        return EXIT_INPUT if e.code not in (0, None) else 0
    if res.as_json:
        print(json.dumps(res.doc, indent=2, sort_keys=True))
    elif res.text:
        stream = sys.stderr if res.code == EXIT_INPUT else sys.stdout
        print(res.text, file=stream)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
