"""Coxeter systems with exact element arithmetic.

Two families are supported.  A *finite* system represents each group element
as a permutation of the full root set of the geometric representation: roots
are generated numerically (entries are snapped to previously seen vectors
with tolerance 1e-9), after which all arithmetic is exact integer permutation
arithmetic.  The construction is self-validating: generator permutations must
be involutions satisfying the braid relations, and the root count must be
twice the number of positive roots, so a misidentified root fails loudly.
A *universal* system (every off-diagonal order infinite) represents each
element by its unique reduced word.

Elements of an enumerated finite group carry dense integer ids, assigned by
breadth-first search from the identity, so downstream tables are plain arrays
indexed by id.  Enumeration is lazy: building a system only builds and
validates the root tables.

Type strings: "A n", "B n", "D n" (n >= 4), "E6"/"E7"/"E8", "F4", "H3",
"H4", "I2(m)", "U n" (universal of rank n).  Labeling follows Bourbaki; in
particular D4 has the branch node at s2.
"""

from __future__ import annotations

import itertools
import math
import re

from .errors import BadMatrix, InfiniteParabolic, NotFinite, SystemMismatch

INF = 0  # internal marker for an infinite bond order

_SNAP = 1e-9


def _parse_type_string(s: str):
    t = s.strip().upper().replace(" ", "")
    m = re.fullmatch(r"I2\((\d+)\)", t)
    if m:
        order = int(m.group(1))
        if order < 2:
            raise BadMatrix(f"I2(m) needs m >= 2: {s!r}")
        return "I2(%d)" % order, [[1, order], [order, 1]]
    m = re.fullmatch(r"([ABDEFHU])(\d+)", t)
    if not m:
        raise BadMatrix(f"unrecognized type string: {s!r}")
    family, n = m.group(1), int(m.group(2))
    name = f"{family}{n}"

    def chain(bonds):
        mat = [[2] * n for _ in range(n)]
        for i in range(n):
            mat[i][i] = 1
        for (i, j), b in bonds.items():
            mat[i][j] = mat[j][i] = b
        return mat

    if family == "A" and n >= 1:
        return name, chain({(i, i + 1): 3 for i in range(n - 1)})
    if family == "B" and n >= 2:
        bonds = {(i, i + 1): 3 for i in range(n - 2)}
        bonds[(n - 2, n - 1)] = 4
        return name, chain(bonds)
    if family == "D" and n >= 4:
        # chain s1-...-s_{n-2} with s_{n-1} and s_n both attached to s_{n-2}
        bonds = {(i, i + 1): 3 for i in range(n - 2)}
        bonds[(n - 3, n - 1)] = 3
        return name, chain(bonds)
    if family == "E" and n in (6, 7, 8):
        bonds = {(0, 2): 3, (1, 3): 3}
        bonds.update({(i, i + 1): 3 for i in range(2, n - 1)})
        return name, chain(bonds)
    if family == "F" and n == 4:
        return name, chain({(0, 1): 3, (1, 2): 4, (2, 3): 3})
    if family == "H" and n in (3, 4):
        bonds = {(i, i + 1): 3 for i in range(1, n - 1)}
        bonds[(0, 1)] = 5
        return name, chain(bonds)
    if family == "U" and n >= 1:
        mat = [[1 if i == j else INF for j in range(n)] for i in range(n)]
        return name, mat
    raise BadMatrix(f"unsupported rank for family {family}: {s!r}")


def _normalize_matrix(matrix):
    n = len(matrix)
    out = []
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise BadMatrix("Coxeter matrix must be square")
        new = []
        for j, m in enumerate(row):
            if m in (math.inf, None, "inf"):
                m = INF
            if not isinstance(m, int):
                raise BadMatrix(f"bad entry m[{i}][{j}] = {m!r}")
            if i == j:
                if m != 1:
                    raise BadMatrix("diagonal entries must be 1")
            elif m != INF and m < 2:
                raise BadMatrix(f"off-diagonal entries must be >= 2 or infinite, got {m}")
            new.append(m)
        out.append(tuple(new))
    for i in range(n):
        for j in range(n):
            if out[i][j] != out[j][i]:
                raise BadMatrix("Coxeter matrix must be symmetric")
    return tuple(out)


def _is_positive_definite(form, tol=1e-9):
    # Cholesky with failure on a nonpositive pivot
    n = len(form)
    L = [[0.0] * n for _ in range(n)]
    for i in range(n):
        d = form[i][i] - sum(L[i][k] ** 2 for k in range(i))
        if d <= tol:
            return False
        L[i][i] = math.sqrt(d)
        for j in range(i + 1, n):
            L[j][i] = (form[j][i] - sum(L[j][k] * L[i][k] for k in range(i))) / L[i][i]
    return True


class CoxeterSystem:
    """A Coxeter system (W, S), either finite or universal."""

    def __init__(self, matrix, name=None):
        self.matrix = _normalize_matrix(matrix)
        self.rank = len(self.matrix)
        self.name = name or f"rank-{self.rank}"
        infinities = [
            (i, j)
            for i in range(self.rank)
            for j in range(i + 1, self.rank)
            if self.matrix[i][j] == INF
        ]
        if not infinities:
            self.family = "finite"
        elif len(infinities) == self.rank * (self.rank - 1) // 2:
            self.family = "universal"
        else:
            raise BadMatrix(
                "matrices mixing finite and infinite orders are not supported; "
                "use an all-infinite (universal) or positive definite matrix"
            )
        self._table = None
        self._reflections = None
        self._bruhat_down = None
        self._aut_list = None
        if self.family == "finite":
            self._build_roots()

    @classmethod
    def from_type(cls, type_string: str) -> "CoxeterSystem":
        name, matrix = _parse_type_string(type_string)
        return cls(matrix, name=name)

    def __repr__(self):
        return f"CoxeterSystem({self.name}, rank={self.rank}, {self.family})"

    # -- geometric representation (finite family) --------------------------

    def _build_roots(self):
        n = self.rank
        form = [
            [-math.cos(math.pi / self.matrix[i][j]) for j in range(n)] for i in range(n)
        ]
        if not _is_positive_definite(form):
            raise NotFinite(f"bilinear form of {self.name} is not positive definite")
        roots: list[tuple[float, ...]] = []

        def find(vec):
            for k, r in enumerate(roots):
                if all(abs(a - b) < _SNAP for a, b in zip(r, vec)):
                    return k
            return None

        def add(vec):
            roots.append(vec)
            return len(roots) - 1

        for i in range(n):
            add(tuple(1.0 if j == i else 0.0 for j in range(n)))

        def reflect(i, vec):
            pairing = 2.0 * sum(form[i][j] * vec[j] for j in range(n))
            out = list(vec)
            out[i] -= pairing
            return tuple(out)

        frontier = list(range(n))
        while frontier:
            nxt = []
            for k in frontier:
                for i in range(n):
                    img = reflect(i, roots[k])
                    if find(img) is None:
                        nxt.append(add(img))
            frontier = nxt
            if len(roots) > 100000:
                raise NotFinite(f"root closure of {self.name} did not terminate")

        perms = []
        for i in range(n):
            images = []
            for vec in roots:
                k = find(reflect(i, vec))
                if k is None:
                    raise NotFinite("root snapping failed to close")
                images.append(k)
            perms.append(tuple(images))

        def sign(vec):
            for c in vec:
                if abs(c) > 1e-6:
                    return c > 0
            raise NotFinite("root with vanishing coordinates")

        positive = tuple(sign(vec) for vec in roots)
        negation = []
        for vec in roots:
            k = find(tuple(-c for c in vec))
            if k is None:
                raise NotFinite("root set is not symmetric under negation")
            negation.append(k)

        # structural self-checks gating the floating-point snapping
        ident = tuple(range(len(roots)))
        for i, p in enumerate(perms):
            if _compose(p, p) != ident:
                raise NotFinite(f"generator {i} is not an involution on roots")
        for i in range(n):
            for j in range(i + 1, n):
                prod = _compose(perms[i], perms[j])
                power = ident
                for _ in range(self.matrix[i][j]):
                    power = _compose(power, prod)
                if power != ident:
                    raise NotFinite(f"braid relation ({i},{j}) fails on roots")
        if sum(positive) * 2 != len(roots):
            raise NotFinite("root set is not split evenly into positive and negative")

        self.roots = tuple(roots)
        self.gen_root_perm = tuple(perms)
        self.root_positive = positive
        self.root_negation = tuple(negation)
        self.n_positive_roots = len(roots) // 2

    # -- group enumeration (finite family) ----------------------------------

    def _ensure_table(self):
        if self._table is None:
            if self.family != "finite":
                raise NotFinite(f"{self.name} is not a finite system")
            self._table = _GroupTable(self)
        return self._table

    def order(self) -> int:
        """|W| (finite family only)."""
        return len(self._ensure_table().perms)

    @property
    def identity(self) -> "Element":
        if self.family == "universal":
            return Element(self, ())
        self._ensure_table()
        return Element(self, 0)

    def generator(self, i: int) -> "Element":
        if not 0 <= i < self.rank:
            raise BadMatrix(f"no generator with index {i}")
        if self.family == "universal":
            return Element(self, (i,))
        return Element(self, self._ensure_table().gen_ids[i])

    def generators(self) -> list["Element"]:
        return [self.generator(i) for i in range(self.rank)]

    def element_from_word(self, word) -> "Element":
        out = self.identity
        for i in word:
            out = out * self.generator(i)
        return out

    def elements(self):
        """All elements in (length, id) order (finite family)."""
        table = self._ensure_table()
        return [Element(self, i) for i in range(len(table.perms))]

    # -- reflections ---------------------------------------------------------

    def reflections(self) -> list["Element"]:
        """All reflections w s w^-1, sorted by (length, id).  Finite family."""
        if self._reflections is None:
            table = self._ensure_table()
            seen = set(table.gen_ids)
            queue = list(table.gen_ids)
            while queue:
                r = queue.pop()
                for s in range(self.rank):
                    c = table.lmult[table.rmult[r][s]][s]  # s r s
                    if c not in seen:
                        seen.add(c)
                        queue.append(c)
            ids = sorted(seen, key=lambda i: (table.length[i], i))
            self._reflections = [Element(self, i) for i in ids]
        return self._reflections

    def reflections_up_to(self, max_length: int) -> list["Element"]:
        """Reflections of length <= max_length (universal family)."""
        if self.family != "universal":
            return [r for r in self.reflections() if r.length <= max_length]
        out = []
        words = [()]
        while words:
            nxt = []
            for w in words:
                if 2 * len(w) + 1 <= max_length:
                    for s in range(self.rank):
                        if w and w[-1] == s:
                            continue
                        out.append(Element(self, w + (s,) + tuple(reversed(w))))
                        if 2 * (len(w) + 1) + 1 <= max_length:
                            nxt.append(w + (s,))
            words = nxt
        return sorted(out, key=lambda r: (r.length, r.key))

    # -- Bruhat order ---------------------------------------------------------

    def _bruhat_table(self):
        if self._bruhat_down is None:
            table = self._ensure_table()
            refl = [r.key for r in self.reflections()]
            ids = sorted(range(len(table.perms)), key=lambda i: (table.length[i], i))
            down = [0] * len(table.perms)
            for y in ids:
                bits = 1 << y
                ly = table.length[y]
                for r in refl:
                    x = table.mult_ids(r, y)
                    if table.length[x] == ly - 1:
                        bits |= down[x]
                down[y] = bits
            self._bruhat_down = down
        return self._bruhat_down

    def bruhat_leq(self, a: "Element", b: "Element") -> bool:
        """The Bruhat order on W, via closure over covers y = rx with a length-1 jump."""
        self._check(a)
        self._check(b)
        if self.family == "universal":
            return _is_subword(a.key, b.key)
        return bool(self._bruhat_table()[b.key] >> a.key & 1)

    # -- longest elements -------------------------------------------------------

    def longest_element(self, J=None) -> "Element":
        """The longest element of the standard parabolic W_J (J = None means all of S)."""
        J = tuple(range(self.rank)) if J is None else tuple(sorted(set(J)))
        if self.family == "universal":
            if len(J) == 0:
                return self.identity
            if len(J) == 1:
                return self.generator(J[0])
            raise InfiniteParabolic(f"W_J is infinite for J = {J} in a universal group")
        table = self._ensure_table()
        w = 0
        while True:
            for s in J:
                y = table.lmult[w][s]
                if table.length[y] > table.length[w]:
                    w = y
                    break
            else:
                return Element(self, w)

    # -- diagram automorphisms ---------------------------------------------------

    def diagram_automorphisms(self) -> list["DiagramAut"]:
        """All permutations of S preserving the Coxeter matrix, identity first."""
        if self._aut_list is None:
            auts = []
            for sigma in itertools.permutations(range(self.rank)):
                if all(
                    self.matrix[sigma[i]][sigma[j]] == self.matrix[i][j]
                    for i in range(self.rank)
                    for j in range(self.rank)
                ):
                    auts.append(DiagramAut(self, sigma))
            auts.sort(key=lambda a: a.sigma)
            self._aut_list = auts
        return self._aut_list

    def identity_aut(self) -> "DiagramAut":
        return DiagramAut(self, tuple(range(self.rank)))

    def w0_aut(self) -> "DiagramAut":
        """Conjugation by the longest element, as a diagram automorphism."""
        w0 = self.longest_element()
        sigma = tuple((w0 * self.generator(i) * w0).key_as_generator() for i in range(self.rank))
        return DiagramAut(self, sigma)

    # -- plumbing ------------------------------------------------------------------

    def _check(self, x):
        if x.system is not self:
            raise SystemMismatch("operands belong to different Coxeter systems")

    def to_json(self) -> dict:
        out = {
            "schema_version": 1,
            "name": self.name,
            "rank": self.rank,
            "family": self.family,
            "matrix": [list(row) for row in self.matrix],
        }
        if self.family == "finite":
            out["order"] = self.order()
            out["n_reflections"] = self.n_positive_roots
        return out


def _compose(p, q):
    """Permutation composition: (p o q)[i] = p[q[i]]."""
    return tuple(p[i] for i in q)


def _is_subword(x, y):
    """Subword property test for words with unique reduced expressions."""
    it = iter(y)
    return all(s in it for s in x)


def _u_mult(a, b):
    """Free product with s^2 = 1: concatenate and cancel at the junction."""
    a = list(a)
    i = 0
    while a and i < len(b) and a[-1] == b[i]:
        a.pop()
        i += 1
    return tuple(a) + tuple(b[i:])


class _GroupTable:
    """Dense-id tables for an enumerated finite group."""

    def __init__(self, system: CoxeterSystem):
        gens = system.gen_root_perm
        n = system.rank
        ident = tuple(range(len(system.roots)))
        perms = [ident]
        index = {ident: 0}
        length = [0]
        rmult = []
        frontier = [0]
        while frontier:
            nxt = []
            for w in frontier:
                pw = perms[w]
                for s in range(n):
                    p = _compose(pw, gens[s])  # w * s
                    i = index.get(p)
                    if i is None:
                        i = len(perms)
                        perms.append(p)
                        index[p] = i
                        length.append(length[w] + 1)
                        nxt.append(i)
            frontier = nxt
            # rmult rows are filled after ids stabilize
        for w, pw in enumerate(perms):
            rmult.append([index[_compose(pw, gens[s])] for s in range(n)])
        lmult = [[index[_compose(gens[s], pw)] for s in range(n)] for pw in perms]
        inverse = []
        for pw in perms:
            inv = [0] * len(pw)
            for i, j in enumerate(pw):
                inv[j] = i
            inverse.append(index[tuple(inv)])
        self.perms = perms
        self.index = index
        self.length = length
        self.rmult = rmult
        self.lmult = lmult
        self.inverse = inverse
        self.gen_ids = [rmult[0][s] for s in range(n)]
        self._words: dict[int, tuple] = {}

    def mult_ids(self, a: int, b: int) -> int:
        return self.index[_compose(self.perms[a], self.perms[b])]

    def word(self, w: int, n_gens: int) -> tuple:
        cached = self._words.get(w)
        if cached is not None:
            return cached
        out = []
        x = w
        while self.length[x]:
            for s in range(n_gens):
                y = self.lmult[x][s]
                if self.length[y] < self.length[x]:
                    out.append(s)
                    x = y
                    break
        word = tuple(out)
        self._words[w] = word
        return word


class Element:
    """A group element: a dense id (finite family) or a reduced word (universal)."""

    __slots__ = ("system", "key")

    def __init__(self, system: CoxeterSystem, key):
        self.system = system
        self.key = key

    @property
    def length(self) -> int:
        if self.system.family == "universal":
            return len(self.key)
        return self.system._table.length[self.key]

    def word(self) -> tuple:
        """The reduced word found by greedy lowest-index left descents."""
        if self.system.family == "universal":
            return self.key
        return self.system._table.word(self.key, self.system.rank)

    def __mul__(self, other: "Element") -> "Element":
        self.system._check(other)
        if self.system.family == "universal":
            return Element(self.system, _u_mult(self.key, other.key))
        return Element(self.system, self.system._table.mult_ids(self.key, other.key))

    def inverse(self) -> "Element":
        if self.system.family == "universal":
            return Element(self.system, tuple(reversed(self.key)))
        return Element(self.system, self.system._table.inverse[self.key])

    def left_descents(self) -> set[int]:
        if self.system.family == "universal":
            return {self.key[0]} if self.key else set()
        t = self.system._table
        return {
            s
            for s in range(self.system.rank)
            if t.length[t.lmult[self.key][s]] < t.length[self.key]
        }

    def right_descents(self) -> set[int]:
        if self.system.family == "universal":
            return {self.key[-1]} if self.key else set()
        t = self.system._table
        return {
            s
            for s in range(self.system.rank)
            if t.length[t.rmult[self.key][s]] < t.length[self.key]
        }

    def bruhat_leq(self, other: "Element") -> bool:
        return self.system.bruhat_leq(self, other)

    def is_identity(self) -> bool:
        return self.length == 0

    def key_as_generator(self) -> int:
        """The generator index of a length-one element."""
        w = self.word()
        if len(w) != 1:
            raise ValueError(f"{self} is not a simple generator")
        return w[0]

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.system is other.system
            and self.key == other.key
        )

    def __hash__(self):
        return hash((id(self.system), self.key))

    def __repr__(self):
        w = self.word()
        return "e" if not w else "*".join(f"s{i + 1}" for i in w)


class DiagramAut:
    """An automorphism of (W, S) given by a permutation of the generator indices."""

    __slots__ = ("system", "sigma", "_elt_cache", "_root_perm")

    def __init__(self, system: CoxeterSystem, sigma):
        sigma = tuple(sigma)
        if sorted(sigma) != list(range(system.rank)):
            raise BadMatrix(f"not a permutation of the generators: {sigma}")
        m = system.matrix
        for i in range(system.rank):
            for j in range(system.rank):
                if m[sigma[i]][sigma[j]] != m[i][j]:
                    raise BadMatrix(f"{sigma} does not preserve the Coxeter matrix")
        self.system = system
        self.sigma = sigma
        self._elt_cache: dict = {}
        self._root_perm = None

    def is_identity(self) -> bool:
        return all(self.sigma[i] == i for i in range(len(self.sigma)))

    def gen(self, i: int) -> int:
        return self.sigma[i]

    def _roots_permuted(self):
        # the linear map sending simple root i to simple root sigma(i), as a
        # permutation of root indices
        if self._root_perm is None:
            sys = self.system
            images = []
            for vec in sys.roots:
                img = [0.0] * sys.rank
                for i, c in enumerate(vec):
                    img[self.sigma[i]] = c
                for k, r in enumerate(sys.roots):
                    if all(abs(a - b) < _SNAP for a, b in zip(r, img)):
                        images.append(k)
                        break
                else:
                    raise BadMatrix("diagram automorphism does not permute the roots")
            self._root_perm = tuple(images)
        return self._root_perm

    def __call__(self, x: Element) -> Element:
        self.system._check(x)
        if self.system.family == "universal":
            return Element(self.system, tuple(self.sigma[s] for s in x.key))
        cached = self._elt_cache.get(x.key)
        if cached is None:
            table = self.system._table
            A = self._roots_permuted()
            Ainv = [0] * len(A)
            for i, j in enumerate(A):
                Ainv[j] = i
            p = table.perms[x.key]
            cached = table.index[tuple(A[p[Ainv[j]]] for j in range(len(A)))]
            self._elt_cache[x.key] = cached
        return Element(self.system, cached)

    def __mul__(self, other: "DiagramAut") -> "DiagramAut":
        if other.system is not self.system:
            raise SystemMismatch("automorphisms of different systems")
        return DiagramAut(self.system, tuple(self.sigma[other.sigma[i]] for i in range(len(self.sigma))))

    def inverse(self) -> "DiagramAut":
        inv = [0] * len(self.sigma)
        for i, j in enumerate(self.sigma):
            inv[j] = i
        return DiagramAut(self.system, tuple(inv))

    def order(self) -> int:
        k, a = 1, self
        while not a.is_identity():
            a = a * self
            k += 1
        return k

    def __eq__(self, other):
        return (
            isinstance(other, DiagramAut)
            and self.system is other.system
            and self.sigma == other.sigma
        )

    def __hash__(self):
        return hash((id(self.system), self.sigma))

    def __repr__(self):
        if self.is_identity():
            return "id"
        return "(" + " ".join(f"s{i + 1}->s{j + 1}" for i, j in enumerate(self.sigma) if i != j) + ")"


class ExtElement:
    """An element (x, theta) of the extended group W+ = W x Aut(W, S)."""

    __slots__ = ("x", "theta")

    def __init__(self, x: Element, theta: DiagramAut):
        if x.system is not theta.system:
            raise SystemMismatch("element and automorphism from different systems")
        self.x = x
        self.theta = theta

    @property
    def system(self) -> CoxeterSystem:
        return self.x.system

    @property
    def length(self) -> int:
        return self.x.length

    def __mul__(self, other: "ExtElement") -> "ExtElement":
        if other.system is not self.system:
            raise SystemMismatch("operands belong to different Coxeter systems")
        return ExtElement(self.x * self.theta(other.x), self.theta * other.theta)

    def inverse(self) -> "ExtElement":
        ti = self.theta.inverse()
        return ExtElement(ti(self.x.inverse()), ti)

    def is_identity(self) -> bool:
        return self.x.is_identity() and self.theta.is_identity()

    def is_twisted_involution(self) -> bool:
        """True iff theta^2 = 1 and theta(x) = x^-1, i.e. (x, theta)^2 = 1."""
        return (self.theta * self.theta).is_identity() and self.theta(
            self.x
        ) == self.x.inverse()

    def __eq__(self, other):
        return (
            isinstance(other, ExtElement)
            and self.x == other.x
            and self.theta == other.theta
        )

    def __hash__(self):
        return hash((self.x, self.theta))

    def __repr__(self):
        return f"({self.x!r}, {self.theta!r})"


def build_system(spec) -> CoxeterSystem:
    """Build a system from a type string or an explicit Coxeter matrix."""
    if isinstance(spec, str):
        return CoxeterSystem.from_type(spec)
    return CoxeterSystem(spec)


def twisted_conjugate(w: Element, a: ExtElement) -> ExtElement:
    """The twisted conjugate (w x theta(w)^-1, theta) of a = (x, theta)."""
    if w.system is not a.system:
        raise SystemMismatch("operands belong to different Coxeter systems")
    return ExtElement(w * a.x * a.theta(w).inverse(), a.theta)
