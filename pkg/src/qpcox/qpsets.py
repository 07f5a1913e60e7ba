"""Scaled W-sets and the quasiparabolic axioms.

Carriers come in four kinds: minimal-length coset representatives of a
standard parabolic subgroup (with the bullet action), twisted conjugacy
classes in the extended group, the regular set (W acting on itself on the
left), and the even double cover of an integer-height set (a W x A1-set over
the generator list S + [s0]).

Heights are stored doubled (height2 = 2 ht), so the half-integer heights of
conjugacy classes stay exact integers.  Point ids are dense and sorted by
(height2, payload), which makes exports deterministic.  Truncated universal
carriers record their cutoff; checks on them quantify only over data the
truncation can see and every verdict carries the cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .coxeter import CoxeterSystem, Element, ExtElement, twisted_conjugate
from .errors import (
    InfiniteParabolic,
    NotQuasiparabolic,
    SystemMismatch,
    TruncationRequired,
)


@dataclass
class QpVerdict:
    is_qp: bool
    axiom: Optional[str] = None  # "QP1" or "QP2" when is_qp is False
    r_word: Optional[tuple] = None
    x: Optional[int] = None
    s: Optional[int] = None
    checked_r_length: Optional[int] = None  # reflection range on truncated carriers

    def witness(self):
        return None if self.is_qp else {
            "axiom": self.axiom,
            "r_word": list(self.r_word),
            "x": self.x,
            "s": self.s,
        }


@dataclass
class _ReflAction:
    word: tuple
    img: list  # point id or None (out of a truncated carrier)
    img_h2: list  # exact height2 of the image, even when out of carrier
    img_payload: list | None = None  # conjugacy kind only


class ScaledWSet:
    """A finite (or height-truncated) carrier with generator action tables."""

    def __init__(self, system, kind, payloads, height2, action, *, theta=None,
                 J=None, seed=None, base=None, truncated_at=None):
        self.system = system
        self.kind = kind
        self.payloads = payloads
        self.height2 = height2
        self.action = action  # action[s][pid] -> pid or None
        self.theta = theta
        self.J = J
        self.seed = seed
        self.base = base
        self.truncated_at = truncated_at
        self.index = {p: i for i, p in enumerate(payloads)}
        self.n_gens = len(action)
        self._qp = None
        self._order = None
        self._refl = {}
        self._validate_scaled()

    # -- basics -------------------------------------------------------------

    def __len__(self):
        return len(self.payloads)

    def __repr__(self):
        extra = f", truncated_at={self.truncated_at}" if self.truncated_at is not None else ""
        return f"ScaledWSet({self.kind}, {len(self)} points on {self.system.name}{extra})"

    def _validate_scaled(self):
        for s in range(self.n_gens):
            row = self.action[s]
            for x, y in enumerate(row):
                if y is None:
                    continue
                if abs(self.height2[y] - self.height2[x]) not in (0, 2):
                    raise ValueError(f"scaled axiom fails: gen {s} at point {x}")
                if row[y] != x:
                    raise ValueError(f"generator {s} is not an involution at point {x}")

    def describe_point(self, pid: int):
        p = self.payloads[pid]
        if self.kind == "conjugacy":
            return {"x": list(p.x.word()), "theta": list(p.theta.sigma)}
        if self.kind == "double-cover":
            return {"base": self.base.describe_point(p[0]), "bit": p[1]}
        return {"x": list(p.word())}

    def orbits(self) -> list[int]:
        """Orbit index per point (connected components of the generator moves)."""
        comp = [-1] * len(self)
        c = 0
        for start in range(len(self)):
            if comp[start] >= 0:
                continue
            stack = [start]
            comp[start] = c
            while stack:
                x = stack.pop()
                for s in range(self.n_gens):
                    y = self.action[s][x]
                    if y is not None and comp[y] < 0:
                        comp[y] = c
                        stack.append(y)
            c += 1
        return comp

    def h_min2(self) -> list[int]:
        """Per point, the minimal height2 in its orbit."""
        comp = self.orbits()
        best = {}
        for x, c in enumerate(comp):
            h = self.height2[x]
            if c not in best or h < best[c]:
                best[c] = h
        return [best[c] for c in comp]

    # -- extremal points ------------------------------------------------------

    def minimal_elements(self) -> list[int]:
        """Points whose height does not drop under any generator."""
        out = []
        for x in range(len(self)):
            ok = True
            for s in range(self.n_gens):
                y = self.action[s][x]
                if y is not None and self.height2[y] < self.height2[x]:
                    ok = False
                    break
            if ok:
                out.append(x)
        return out

    def maximal_elements(self) -> list[int]:
        out = []
        for x in range(len(self)):
            ok = True
            for s in range(self.n_gens):
                y = self.action[s][x]
                if y is None or self.height2[y] > self.height2[x]:
                    ok = False  # a truncated-away image counts as an ascent
                    break
            if ok:
                out.append(x)
        return out

    # -- reflection actions -----------------------------------------------------

    def reflection_actions(self, max_length: Optional[int] = None) -> list[_ReflAction]:
        key = max_length
        if key in self._refl:
            return self._refl[key]
        sys = self.system
        if self.kind == "double-cover":
            # reflections of W x A1 are the reflections of W plus s0 itself
            out = []
            for ra in self.base.reflection_actions(max_length):
                img, h2 = [], []
                for pid, (b, k) in enumerate(self.payloads):
                    rb = ra.img[b]
                    q = self.index[(rb, 1 - k)]
                    img.append(q)
                    h2.append(self.height2[q])
                out.append(_ReflAction(ra.word, img, h2))
            s0 = self.n_gens - 1
            img = [self.action[s0][pid] for pid in range(len(self))]
            out.append(_ReflAction((s0,), img, [self.height2[q] for q in img]))
            self._refl[key] = out
            return out

        if sys.family == "universal":
            if self.kind != "conjugacy":
                raise TruncationRequired(
                    "reflection actions on universal carriers exist only for conjugacy kind"
                )
            bound = max_length if max_length is not None else (self.truncated_at or 0) + 1
            refl = sys.reflections_up_to(bound)
        else:
            refl = sys.reflections()

        out = []
        for r in refl:
            img, h2 = [], []
            payloads = [] if self.kind == "conjugacy" else None
            for pid in range(len(self)):
                q_payload = self._act_element(r, pid)
                q = self.index.get(q_payload)
                img.append(q)
                if q is not None:
                    h2.append(self.height2[q])
                else:
                    h2.append(q_payload.length)  # exact, conjugacy payloads only
                if payloads is not None:
                    payloads.append(q_payload)
            out.append(_ReflAction(r.word(), img, h2, payloads))
        self._refl[key] = out
        return out

    def _act_element(self, w: Element, pid: int):
        """The payload of w . x for a whole group element w (non-cover kinds)."""
        p = self.payloads[pid]
        if self.kind == "conjugacy":
            return twisted_conjugate(w, p)
        if self.kind == "coset":
            return _coset_canonical(self.system, w * p, self.J)
        return w * p  # regular

    # -- JSON ---------------------------------------------------------------------

    def to_json(self, verdict: Optional[QpVerdict] = None) -> dict:
        out = {
            "schema_version": 1,
            "system": self.system.name,
            "kind": self.kind,
            "truncated_at": self.truncated_at,
            "points": [
                {"id": i, "payload": self.describe_point(i), "height2": self.height2[i]}
                for i in range(len(self))
            ],
            "action": [list(row) for row in self.action],
            "minimal": self.minimal_elements(),
            "maximal": self.maximal_elements(),
        }
        if verdict is not None:
            out["quasiparabolic"] = verdict.is_qp
            out["witness"] = verdict.witness()
        return out


def _coset_canonical(system, w: Element, J) -> Element:
    # minimal-length representative of the coset w W_J
    while True:
        for t in J:
            wt = w * system.generator(t)
            if wt.length < w.length:
                w = wt
                break
        else:
            return w


def _sort_points(payload_h2_pairs, keyfn):
    pairs = sorted(payload_h2_pairs, key=lambda it: (it[1], keyfn(it[0])))
    return [p for p, _ in pairs], [h for _, h in pairs]


def coset_set(system: CoxeterSystem, J) -> ScaledWSet:
    """The set W^J of minimal coset representatives, heights ht = length."""
    J = tuple(sorted(set(J)))
    if system.family == "universal":
        raise InfiniteParabolic("universal coset sets are infinite; use a conjugacy carrier")
    ident = system.identity
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in range(system.rank):
                z = system.generator(s) * w
                if z in seen:
                    continue
                if all((z * system.generator(t)).length > z.length for t in J):
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    payloads, height2 = _sort_points([(w, 2 * w.length) for w in seen], lambda w: w.key)
    index = {p: i for i, p in enumerate(payloads)}
    action = []
    for s in range(system.rank):
        gen = system.generator(s)
        row = []
        for w in payloads:
            z = gen * w
            row.append(index[z] if z in index else index[w])  # bullet action
        action.append(row)
    kind = "coset" if J else "regular"
    return ScaledWSet(system, kind, payloads, height2, action, J=J)


def regular_set(system: CoxeterSystem) -> ScaledWSet:
    """The set (W, length) with the left multiplication action."""
    return coset_set(system, ())


def conjugacy_set(system: CoxeterSystem, seed: ExtElement, cutoff: Optional[int] = None) -> ScaledWSet:
    """The twisted conjugacy class of seed, with doubled height = length."""
    if system.family == "universal" and cutoff is None:
        raise TruncationRequired("universal conjugacy classes need a height cutoff")
    if seed.system is not system:
        raise SystemMismatch("seed belongs to a different system")
    limit = None if system.family == "finite" else cutoff
    seen = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for p in frontier:
            for s in range(system.rank):
                q = twisted_conjugate(system.generator(s), p)
                if q not in seen and (limit is None or q.length <= limit):
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt

    def keyfn(p):
        return p.x.key

    # ht = length / 2, so height2 is the length itself
    payloads, height2 = _sort_points([(p, p.length) for p in seen], keyfn)
    index = {p: i for i, p in enumerate(payloads)}
    action = []
    for s in range(system.rank):
        gen = system.generator(s)
        row = []
        for p in payloads:
            q = twisted_conjugate(gen, p)
            row.append(index.get(q))
        action.append(row)
    return ScaledWSet(
        system, "conjugacy", payloads, height2, action,
        theta=seed.theta, seed=seed, truncated_at=limit,
    )


def even_double_cover(X: ScaledWSet) -> ScaledWSet:
    """The even W x A1-set on X x {0, 1}; the extra generator s0 flips the bit."""
    if X.truncated_at is not None:
        raise TruncationRequired("double cover of a truncated carrier is not supported")
    if any(h % 2 for h in X.height2):
        raise ValueError("even double cover needs integer heights (height2 even)")
    pts = []
    for b in range(len(X)):
        h = X.height2[b]
        for k in (0, 1):
            lift = h + (0 if (h // 2) % 2 == k else 2)
            pts.append(((b, k), lift))
    payloads, height2 = _sort_points(pts, lambda p: p)
    index = {p: i for i, p in enumerate(payloads)}
    action = []
    for s in range(X.n_gens):
        row = []
        for (b, k) in payloads:
            row.append(index[(X.action[s][b], 1 - k)])
        action.append(row)
    action.append([index[(b, 1 - k)] for (b, k) in payloads])  # s0
    cover = ScaledWSet(X.system, "double-cover", payloads, height2, action, base=X)
    for s in range(cover.n_gens):  # evenness: no generator fixes a point
        assert all(cover.action[s][x] != x for x in range(len(cover)))
    return cover


# ---------------------------------------------------------------------------
# quasiparabolicity


def check_quasiparabolic(X: ScaledWSet, max_reflection_length: Optional[int] = None) -> QpVerdict:
    """Exhaustively check (QP1) over R x X and (QP2) over R x X x S.

    On truncated universal carriers the reflection range is finite (word
    length <= cutoff + 1 by default) and heights of out-of-carrier images are
    still computed exactly from payload lengths, so every reported witness is
    genuine.
    """
    if X._qp is not None and max_reflection_length is None:
        return X._qp
    refl = X.reflection_actions(max_reflection_length)
    h2 = X.height2
    verdict = None
    bound = max(len(ra.word) for ra in refl) if refl and X.truncated_at is not None else None

    for ra in refl:
        for x in range(len(X)):
            if ra.img_h2[x] == h2[x] and ra.img[x] != x:
                verdict = QpVerdict(False, "QP1", ra.word, x, None, bound)
                break
        if verdict:
            break

    if verdict is None:
        for ra in refl:
            for x in range(len(X)):
                if ra.img_h2[x] <= h2[x]:
                    continue
                rx = ra.img[x]
                for s in range(X.n_gens):
                    sx = X.action[s][x]
                    if sx is None:
                        continue
                    if rx is not None:
                        srx = X.action[s][rx]
                        if srx is not None:
                            h_srx = h2[srx]
                        elif ra.img_payload is not None:
                            h_srx = twisted_conjugate(
                                X.system.generator(s), ra.img_payload[x]
                            ).length
                        else:
                            continue
                    elif ra.img_payload is not None:
                        h_srx = twisted_conjugate(
                            X.system.generator(s), ra.img_payload[x]
                        ).length
                    else:
                        continue
                    if h_srx < h2[sx] and rx != sx:
                        verdict = QpVerdict(False, "QP2", ra.word, x, s, bound)
                        break
                if verdict:
                    break
            if verdict:
                break

    if verdict is None:
        verdict = QpVerdict(True, checked_r_length=bound)
    if max_reflection_length is None:
        X._qp = verdict
    return verdict


def check_qp1_only(X: ScaledWSet, max_reflection_length: Optional[int] = None) -> bool:
    """Whether (QP1) alone holds; a diagnostic for counterexample hunting."""
    refl = X.reflection_actions(max_reflection_length)
    for ra in refl:
        for x in range(len(X)):
            if ra.img_h2[x] == X.height2[x] and ra.img[x] != x:
                return False
    return True


def revalidate_witness(X: ScaledWSet, witness: dict) -> bool:
    """Re-check a stored QP witness against a freshly built carrier."""
    word = tuple(witness["r_word"])
    x = witness["x"]
    r = X.system.element_from_word(word)
    if r.length != len(word):
        return False
    rx = X._act_element(r, x) if X.kind != "double-cover" else None
    if X.kind == "double-cover":
        for ra in X.reflection_actions():
            if ra.word == word:
                rx_id, h_rx = ra.img[x], ra.img_h2[x]
                break
        else:
            return False
    else:
        rx_id = X.index.get(rx)
        h_rx = X.height2[rx_id] if rx_id is not None else rx.length
    if witness["axiom"] == "QP1":
        return h_rx == X.height2[x] and rx_id != x
    s = witness["s"]
    sx = X.action[s][x]
    if sx is None or rx_id is None:
        return False
    srx = X.action[s][rx_id]
    if srx is None:
        return False
    return (
        h_rx > X.height2[x]
        and X.height2[srx] < X.height2[sx]
        and rx_id != sx
    )


# ---------------------------------------------------------------------------
# Bruhat order on a quasiparabolic carrier


class XOrder:
    """Reachability bitsets for the Bruhat order on a carrier."""

    def __init__(self, downsets: list[int], label: Optional[str] = None):
        self.downsets = downsets
        self.label = label

    def leq(self, x: int, y: int) -> bool:
        return bool(self.downsets[y] >> x & 1)

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)

    def downset_ids(self, y: int) -> list[int]:
        bits = self.downsets[y]
        return [i for i in range(bits.bit_length()) if bits >> i & 1]


def bruhat_order(X: ScaledWSet, max_reflection_length: Optional[int] = None) -> XOrder:
    """Transitive closure of x < rx over reflections that raise the height.

    Requires the quasiparabolic axioms (raises NotQuasiparabolic otherwise).
    The result is graded: closing only over height-unit edges gives the same
    order, which is asserted on untruncated carriers.
    """
    if X._order is not None and max_reflection_length is None:
        return X._order
    verdict = check_quasiparabolic(X, max_reflection_length)
    if not verdict.is_qp:
        raise NotQuasiparabolic(f"carrier fails {verdict.axiom} at point {verdict.x}")
    refl = X.reflection_actions(max_reflection_length)
    n = len(X)
    in_edges: list[list[int]] = [[] for _ in range(n)]
    cover_in: list[list[int]] = [[] for _ in range(n)]
    for ra in refl:
        for x in range(n):
            y = ra.img[x]
            if y is not None and X.height2[y] > X.height2[x]:
                in_edges[y].append(x)
                if X.height2[y] == X.height2[x] + 2:
                    cover_in[y].append(x)

    def close(edges):
        down = [0] * n
        for y in sorted(range(n), key=lambda i: (X.height2[i], i)):
            bits = 1 << y
            for x in edges[y]:
                bits |= down[x]
            down[y] = bits
        return down

    down = close(in_edges)
    if X.truncated_at is None:
        assert down == close(cover_in), "Bruhat order on the carrier is not graded"
    label = None if X.truncated_at is None else f"verified up to height {X.truncated_at}"
    order = XOrder(down, label)
    if max_reflection_length is None:
        X._order = order
    return order


# ---------------------------------------------------------------------------
# height witnesses


def rht_witness_word(X: ScaledWSet, pid: int) -> tuple:
    """A word w with x = w . x0 and len(w) = ht(x) - ht(x0), by greedy descent.

    Ties are broken toward the lowest generator index, so results are
    deterministic; any valid choice gives the same bar operator downstream.
    """
    word = []
    x = pid
    while True:
        for s in range(X.n_gens):
            y = X.action[s][x]
            if y is not None and X.height2[y] < X.height2[x]:
                word.append(s)
                x = y
                break
        else:
            break
    # a truncated-away image always lies above the cutoff, so the stuck point
    # is W-minimal even when some of its images are missing from the carrier
    return tuple(word)


def rht_witness(X: ScaledWSet, pid: int) -> Element:
    if X.kind == "double-cover":
        raise ValueError("double-cover witnesses are words over S + [s0]; use rht_witness_word")
    word = rht_witness_word(X, pid)
    w = X.system.element_from_word(word)
    assert w.length == len(word), "greedy descent produced a non-reduced witness"
    return w
