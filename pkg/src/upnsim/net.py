"""Deterministic inhibitor Petri nets: construction, validation, execution,
and a line-oriented text format.

Transition indices double as priorities: at every step the enabled
transition with the smallest index fires, so a run is a pure function of
the net and its starting marking.  Token counts and arc weights are plain
Python integers and may grow without bound.

Two execution modes are provided.  ``exact`` applies the firing rule one
transition at a time.  ``accelerated`` fires the chosen transition in
batches of k when a closed-form analysis proves that it stays the
minimal-index enabled transition throughout; expanded batch-wise, the
firing sequence is identical to exact mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import ParseError

INHIBITOR = -1

Marking = tuple[int, ...]

Observer = Callable[[int, int, Sequence[int]], None]


class FiringError(RuntimeError):
    """Raised when a disabled transition is asked to fire."""


@dataclass(frozen=True)
class StepOutcome:
    """Result of one step: which transition fired and how many times, or a halt."""

    transition: int | None
    batch: int = 0

    @property
    def halted(self) -> bool:
        return self.transition is None


HALTED = StepOutcome(transition=None, batch=0)


@dataclass(frozen=True)
class RunResult:
    marking: Marking
    firings: int
    halted: bool


class Net:
    """An inhibitor Petri net with priority-ordered transitions.

    Places are indexed 1..place_count, transitions 1..transition_count.
    Each (transition, place) pair may carry at most one input arc (regular
    weighted or inhibitor) and one output arc.  Arc endpoints are not
    range-checked at construction time; `validate` reports such defects as
    diagnostics and the execution engine refuses nets that have them.
    """

    def __init__(
        self,
        place_count: int,
        transition_count: int,
        place_names: dict[int, str] | None = None,
        transition_names: dict[int, str] | None = None,
    ):
        if place_count < 0 or transition_count < 0:
            raise ValueError("place and transition counts must be nonnegative")
        self.place_count = place_count
        self.transition_count = transition_count
        self.place_names = dict(place_names or {})
        self.transition_names = dict(transition_names or {})
        self._inputs: dict[tuple[int, int], int] = {}
        self._outputs: dict[tuple[int, int], int] = {}
        self._tables = None

    def add_input(self, t: int, p: int, weight: int) -> None:
        """Arc from place p to transition t consuming `weight` tokens."""
        if (t, p) in self._inputs:
            raise ValueError(f"duplicate input arc t{t} p{p}")
        self._inputs[(t, p)] = weight
        self._tables = None

    def add_inhibitor(self, t: int, p: int) -> None:
        """Inhibitor arc: t is enabled only while place p is empty."""
        if (t, p) in self._inputs:
            raise ValueError(f"duplicate input arc t{t} p{p}")
        self._inputs[(t, p)] = INHIBITOR
        self._tables = None

    def add_output(self, t: int, p: int, weight: int) -> None:
        """Arc from transition t to place p producing `weight` tokens."""
        if (t, p) in self._outputs:
            raise ValueError(f"duplicate output arc t{t} p{p}")
        self._outputs[(t, p)] = weight
        self._tables = None

    def input_arcs(self, t: int) -> list[tuple[int, int]]:
        """(place, weight) input pairs of t, inhibitors as (place, INHIBITOR)."""
        return sorted((p, w) for (ti, p), w in self._inputs.items() if ti == t)

    def output_arcs(self, t: int) -> list[tuple[int, int]]:
        return sorted((p, w) for (ti, p), w in self._outputs.items() if ti == t)

    @property
    def arc_count(self) -> int:
        return len(self._inputs) + len(self._outputs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Net):
            return NotImplemented
        return (
            self.place_count == other.place_count
            and self.transition_count == other.transition_count
            and self._inputs == other._inputs
            and self._outputs == other._outputs
            and self.place_names == other.place_names
            and self.transition_names == other.transition_names
        )

    def __repr__(self) -> str:
        return f"Net(places={self.place_count}, transitions={self.transition_count}, arcs={self.arc_count})"

    # Per-transition tables in 0-based form, rebuilt after any arc change.
    def _compiled(self):
        if self._tables is None:
            bad = [d for d in validate(self) if not d.startswith("unreferenced")]
            if bad:
                raise ValueError("net is not executable: " + "; ".join(bad))
            n = self.transition_count
            ins: list[tuple] = [() for _ in range(n)]
            inh: list[tuple] = [() for _ in range(n)]
            outs: list[tuple] = [() for _ in range(n)]
            delta: list[dict[int, int]] = [{} for _ in range(n)]
            for (t, p), w in sorted(self._inputs.items()):
                if w == INHIBITOR:
                    inh[t - 1] += (p - 1,)
                else:
                    ins[t - 1] += ((p - 1, w),)
                    delta[t - 1][p - 1] = delta[t - 1].get(p - 1, 0) - w
            for (t, p), w in sorted(self._outputs.items()):
                outs[t - 1] += ((p - 1, w),)
                delta[t - 1][p - 1] = delta[t - 1].get(p - 1, 0) + w
            self._tables = (ins, inh, outs, delta)
        return self._tables


def validate(net: Net) -> list[str]:
    """Structural diagnostics; an empty list means the net is well-formed."""
    diags = []
    seen_places = set()
    for (t, p), w in sorted(net._inputs.items()):
        seen_places.add(p)
        if not 1 <= t <= net.transition_count:
            diags.append(f"transition t{t} out of range on arc t{t}<-p{p}")
        if not 1 <= p <= net.place_count:
            diags.append(f"place p{p} out of range on arc t{t}<-p{p}")
        if w != INHIBITOR and w < 1:
            diags.append(f"input arc t{t}<-p{p} has nonpositive weight {w}")
    for (t, p), w in sorted(net._outputs.items()):
        seen_places.add(p)
        if not 1 <= t <= net.transition_count:
            diags.append(f"transition t{t} out of range on arc t{t}->p{p}")
        if not 1 <= p <= net.place_count:
            diags.append(f"place p{p} out of range on arc t{t}->p{p}")
        if w < 1:
            diags.append(f"output arc t{t}->p{p} has nonpositive weight {w} (inhibitors are input-only)")
    for p in range(1, net.place_count + 1):
        if p not in seen_places:
            diags.append(f"unreferenced place p{p}")
    return diags


def _check_marking(net: Net, marking: Sequence[int]) -> None:
    if len(marking) != net.place_count:
        raise ValueError(f"marking has {len(marking)} entries, net has {net.place_count} places")
    for j, v in enumerate(marking, start=1):
        if v < 0:
            raise ValueError(f"negative token count {v} in place p{j}")


def is_enabled(net: Net, marking: Sequence[int], t: int) -> bool:
    """True iff transition t may fire: regular inputs covered, inhibited places empty."""
    if not 1 <= t <= net.transition_count:
        raise ValueError(f"transition index {t} out of range 1..{net.transition_count}")
    _check_marking(net, marking)
    ins, inh, _, _ = net._compiled()
    for p, w in ins[t - 1]:
        if marking[p] < w:
            return False
    for p in inh[t - 1]:
        if marking[p]:
            return False
    return True


def fire(net: Net, marking: Sequence[int], t: int) -> Marking:
    """Fire transition t once and return the successor marking.

    Firing a disabled transition is a contract violation, never a silent
    clamp: raises FiringError before touching anything.
    """
    if not is_enabled(net, marking, t):
        raise FiringError(f"transition t{t} is not enabled")
    ins, _, outs, _ = net._compiled()
    m = list(marking)
    for p, w in ins[t - 1]:
        m[p] -= w
    for p, w in outs[t - 1]:
        m[p] += w
    return tuple(m)


def first_enabled(net: Net, marking: Sequence[int]) -> int | None:
    """Index of the minimal enabled transition, or None when the net is halted."""
    _check_marking(net, marking)
    ins, inh, _, _ = net._compiled()
    return _scan(ins, inh, list(marking), net.transition_count)


def _scan(ins, inh, m, n) -> int | None:
    for i in range(n):
        for p, w in ins[i]:
            if m[p] < w:
                break
        else:
            for p in inh[i]:
                if m[p]:
                    break
            else:
                return i
    return None


def step_exact(net: Net, marking: Sequence[int]) -> tuple[StepOutcome, Marking]:
    """Fire the minimal-index enabled transition once, or report a halt."""
    t = first_enabled(net, marking)
    if t is None:
        return HALTED, tuple(marking)
    return StepOutcome(transition=t + 1, batch=1), fire(net, marking, t + 1)


def _batch_size(ins, inh, delta, m, t, cap) -> int:
    """Largest k such that t itself stays enabled through k consecutive firings.

    Token deltas per firing are constant, so the bound is a floor of
    divisions.  Returns `cap` when no input ever runs dry.
    """
    k = cap
    dl = delta[t]
    for p, w in ins[t]:
        d = dl.get(p, 0)
        if d < 0:
            limit = (m[p] - w) // (-d) + 1
            if k is None or limit < k:
                k = limit
    for p in inh[t]:
        if dl.get(p, 0) > 0:
            return 1
    return 1 if k is None else max(k, 1)


def _smaller_stay_disabled(ins, inh, delta, m, t, k) -> bool:
    """Can every transition below t be proven disabled at the k-1 intermediate markings?

    Transition u stays disabled if one of its blockers persists: a regular
    input that never reaches its weight, or an inhibited place that never
    empties.  Marking values evolve linearly under repeated firing of t, so
    each blocker is a closed-form check.
    """
    dl = delta[t]
    steps = k - 1
    for u in range(t):
        blocked = False
        for p, w in ins[u]:
            d = dl.get(p, 0)
            if d <= 0:
                if m[p] < w:
                    blocked = True
                    break
            elif m[p] + steps * d < w:
                blocked = True
                break
        if not blocked:
            for p in inh[u]:
                d = dl.get(p, 0)
                if d >= 0:
                    if m[p] > 0 or d > 0:
                        blocked = True
                        break
                elif m[p] + steps * d >= 1:
                    blocked = True
                    break
        if not blocked:
            return False
    return True


def step_accelerated(
    net: Net, marking: Sequence[int], max_batch: int | None = None
) -> tuple[StepOutcome, Marking]:
    """Like step_exact, but fires the chosen transition in one batch of k >= 1.

    k is maximal subject to the transition remaining the minimal-index
    enabled one throughout, as far as the closed-form analysis can prove
    without replaying; when it cannot, k falls back to 1.  The final marking
    equals k applications of step_exact.  `max_batch` caps k (a run uses its
    remaining budget); without a cap, a provably never-ending batch also
    falls back to single firings.
    """
    _check_marking(net, marking)
    ins, inh, outs, delta = net._compiled()
    m = list(marking)
    t = _scan(ins, inh, m, net.transition_count)
    if t is None:
        return HALTED, tuple(marking)
    k = _batch_size(ins, inh, delta, m, t, max_batch)
    if k > 1 and not _smaller_stay_disabled(ins, inh, delta, m, t, k):
        k = 1
    for p, w in ins[t]:
        m[p] -= w * k
    for p, w in outs[t]:
        m[p] += w * k
    return StepOutcome(transition=t + 1, batch=k), tuple(m)


def run(
    net: Net,
    marking: Sequence[int],
    budget: int,
    mode: str = "exact",
    observer: Observer | None = None,
) -> RunResult:
    """Run until halt or until `budget` exact-equivalent firings are spent.

    An accelerated batch of k counts as k firings.  `observer`, when given,
    is called after every firing event as observer(transition, batch,
    marking); the marking argument is a live view, valid only during the
    call.  Budget exhaustion is a normal, flagged result.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if mode not in ("exact", "accelerated"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_marking(net, marking)
    ins, inh, outs, delta = net._compiled()
    n = net.transition_count
    m = list(marking)
    fired = 0
    if mode == "exact":
        while fired < budget:
            t = _scan(ins, inh, m, n)
            if t is None:
                break
            for p, w in ins[t]:
                m[p] -= w
            for p, w in outs[t]:
                m[p] += w
            fired += 1
            if observer is not None:
                observer(t + 1, 1, m)
    else:
        while fired < budget:
            t = _scan(ins, inh, m, n)
            if t is None:
                break
            k = _batch_size(ins, inh, delta, m, t, budget - fired)
            if k > 1 and not _smaller_stay_disabled(ins, inh, delta, m, t, k):
                k = 1
            for p, w in ins[t]:
                m[p] -= w * k
            for p, w in outs[t]:
                m[p] += w * k
            fired += k
            if observer is not None:
                observer(t + 1, k, m)
    halted = _scan(ins, inh, m, n) is None
    return RunResult(marking=tuple(m), firings=fired, halted=halted)


# ---------------------------------------------------------------------------
# Text format (.dipn): line-oriented, '#' comments, whitespace-separated.

def _place_ref(token: str, line: int) -> int:
    if not token.startswith("p") or not token[1:].isdigit():
        raise ParseError(f"expected place reference like p3, got {token!r}", line)
    return int(token[1:])


def _transition_ref(token: str, line: int) -> int:
    if not token.startswith("t") or not token[1:].isdigit():
        raise ParseError(f"expected transition reference like t2, got {token!r}", line)
    return int(token[1:])


def _count(token: str, line: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", line) from None
    if value < 0:
        raise ParseError(f"{what} must be nonnegative, got {value}", line)
    return value


def parse_net(text: str) -> tuple[Net, Marking]:
    """Parse a .dipn document into a net and its initial marking."""
    net: Net | None = None
    init: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if net is None:
            if kind != "dipn" or len(fields) != 3:
                raise ParseError("file must start with 'dipn <places> <transitions>'", lineno)
            net = Net(_count(fields[1], lineno, "place count"),
                      _count(fields[2], lineno, "transition count"))
            continue
        if kind == "dipn":
            raise ParseError("duplicate dipn header", lineno)
        if kind == "name":
            if len(fields) != 3:
                raise ParseError("expected 'name p<j>|t<i> <label>'", lineno)
            ref, label = fields[1], fields[2]
            if ref.startswith("p"):
                j = _place_ref(ref, lineno)
                if j in net.place_names:
                    raise ParseError(f"duplicate name for p{j}", lineno)
                net.place_names[j] = label
            elif ref.startswith("t"):
                i = _transition_ref(ref, lineno)
                if i in net.transition_names:
                    raise ParseError(f"duplicate name for t{i}", lineno)
                net.transition_names[i] = label
            else:
                raise ParseError(f"expected p<j> or t<i>, got {ref!r}", lineno)
        elif kind == "arc":
            if len(fields) not in (4, 5):
                raise ParseError("expected 'arc t<i> p<j> in|out|inhib [weight]'", lineno)
            t = _transition_ref(fields[1], lineno)
            p = _place_ref(fields[2], lineno)
            direction = fields[3]
            try:
                if direction == "inhib":
                    if len(fields) != 4:
                        raise ParseError("inhibitor arcs carry no weight", lineno)
                    net.add_inhibitor(t, p)
                elif direction in ("in", "out"):
                    if len(fields) != 5:
                        raise ParseError(f"'{direction}' arc needs a weight", lineno)
                    weight = _count(fields[4], lineno, "arc weight")
                    if direction == "in":
                        net.add_input(t, p, weight)
                    else:
                        net.add_output(t, p, weight)
                else:
                    raise ParseError(f"unknown arc direction {direction!r}", lineno)
            except ValueError as exc:
                if isinstance(exc, ParseError):
                    raise
                raise ParseError(str(exc), lineno) from None
        elif kind == "init":
            if len(fields) != 3:
                raise ParseError("expected 'init p<j> <count>'", lineno)
            j = _place_ref(fields[1], lineno)
            if j in init:
                raise ParseError(f"duplicate init for p{j}", lineno)
            init[j] = _count(fields[2], lineno, "token count")
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    if net is None:
        raise ParseError("empty document: missing dipn header")
    for j in init:
        if not 1 <= j <= net.place_count:
            raise ParseError(f"init references place p{j} outside 1..{net.place_count}")
    marking = tuple(init.get(j, 0) for j in range(1, net.place_count + 1))
    return net, marking


def serialize_net(net: Net, marking: Sequence[int] | None = None) -> str:
    """Render a net (and optional marking) in canonical, byte-stable form.

    Arcs are emitted sorted by (transition, place, input-before-output), so
    serializing a parsed document is idempotent.
    """
    lines = [f"dipn {net.place_count} {net.transition_count}"]
    for j in sorted(net.place_names):
        lines.append(f"name p{j} {net.place_names[j]}")
    for i in sorted(net.transition_names):
        lines.append(f"name t{i} {net.transition_names[i]}")
    for t in range(1, net.transition_count + 1):
        for p in range(1, net.place_count + 1):
            w = net._inputs.get((t, p))
            if w == INHIBITOR:
                lines.append(f"arc t{t} p{p} inhib")
            elif w is not None:
                lines.append(f"arc t{t} p{p} in {w}")
            w = net._outputs.get((t, p))
            if w is not None:
                lines.append(f"arc t{t} p{p} out {w}")
    if marking is not None:
        for j, count in enumerate(marking, start=1):
            if count:
                lines.append(f"init p{j} {count}")
    return "\n".join(lines) + "\n"
