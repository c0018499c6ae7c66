"""
MSPELab - Motor de Permutações (cálculo de réplicas)

Este módulo contém o cálculo exato sobre o grupo simétrico S_k:
enumeração, contagem de ciclos, operadores de permutação de réplicas,
momentos analíticos do ensemble de Hilbert-Schmidt generalizado (GHS),
o sistema linear de tempo finito para α(g), os limites de t e d grandes,
previsões de taxa de convergência, a recursão de apagamentos esparsos e a
entropia condicional recozida em forma fechada.

Somas de potências de d e fatoriais usam inteiros de precisão arbitrária;
a conversão para ponto flutuante acontece apenas na interface.

Autor: MSPELab Team
Versão: 1.0.0
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.errors import ArgumentError, NumericError, ResourceError
from core.engines.linalg_engine import schatten_norm
from core.mspe.moments import DEFAULT_MOMENT_BUDGET, MomentTensor, check_moment_budget

logger = logging.getLogger(__name__)

MAX_ENUMERATION_K = 8
MAX_GRAM_K = 6
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Permutation:
    """Elemento g de S_k com image[i] = g(i)."""

    image: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if sorted(image) != list(range(len(image))):
            raise ArgumentError(f"Imagem não é uma bijeção de {{0..{len(image) - 1}}}: {image}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))

    @classmethod
    def transposition(cls, k: int, i: int, j: int) -> "Permutation":
        image = list(range(k))
        image[i], image[j] = image[j], image[i]
        return cls(tuple(image))

    @classmethod
    def cycle(cls, k: int, length: Optional[int] = None) -> "Permutation":
        """Ciclo progressivo (0 1 ... length−1), identidade nos demais elementos."""
        length = k if length is None else length
        image = [(i + 1) % length if i < length else i for i in range(k)]
        return cls(tuple(image))

    @property
    def k(self) -> int:
        return len(self.image)

    @cached_property
    def cycles(self) -> int:
        """l(g): número de ciclos, incluindo pontos fixos."""
        return len(self.cycle_lengths)

    @cached_property
    def cycle_lengths(self) -> Tuple[int, ...]:
        seen = [False] * self.k
        lengths = []
        for start in range(self.k):
            if seen[start]:
                continue
            length, current = 0, start
            while not seen[current]:
                seen[current] = True
                current = self.image[current]
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths))

    @property
    def cycle_type(self) -> str:
        """Rótulo do tipo de ciclo, ex. "1+1+2"."""
        return "+".join(str(x) for x in self.cycle_lengths)

    def compose(self, other: "Permutation") -> "Permutation":
        """(self ∘ other)(i) = self(other(i))."""
        if other.k != self.k:
            raise ArgumentError(f"Permutações de tamanhos diferentes: {self.k} e {other.k}")
        return Permutation(tuple(self.image[j] for j in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.image == tuple(range(self.k))

    def is_transposition(self) -> bool:
        return self.cycles == self.k - 1

    def __str__(self) -> str:
        return f"g{list(self.image)}"


# ---------------------------------------------------------------------------
# Enumeração e contagem vetorizada de ciclos
# ---------------------------------------------------------------------------

def _check_k(k: int, cap: int = MAX_ENUMERATION_K) -> None:
    if int(k) < 1:
        raise ArgumentError(f"Número de réplicas deve ser >= 1, recebido {k}")
    if int(k) > cap:
        raise ResourceError(f"k = {k} excede o limite de enumeração {cap} ({cap}! elementos)")


@lru_cache(maxsize=None)
def sym_images(k: int) -> np.ndarray:
    """Matriz (k!, k) com as imagens de S_k em ordem lexicográfica (identidade primeiro)."""
    _check_k(k)
    images = np.array(list(itertools.permutations(range(k))), dtype=np.int64).reshape(-1, k)
    images.setflags(write=False)
    return images


@lru_cache(maxsize=None)
def enumerate_sym(k: int) -> Tuple[Permutation, ...]:
    """Todos os k! elementos de S_k."""
    return tuple(Permutation(tuple(row)) for row in sym_images(k))


def cycle_counts(images: np.ndarray) -> np.ndarray:
    """l(g) para cada linha de uma matriz de imagens (M, k)."""
    images = np.asarray(images, dtype=np.int64)
    m, k = images.shape
    start = np.broadcast_to(np.arange(k), (m, k))
    current = start.copy()
    orbit_min = start.copy()
    for _ in range(k - 1):
        current = np.take_along_axis(images, current, axis=1)
        orbit_min = np.minimum(orbit_min, current)
    return (orbit_min == start).sum(axis=1)


def _inverse_images(images: np.ndarray) -> np.ndarray:
    inv = np.empty_like(images)
    rows = np.arange(images.shape[0])[:, None]
    inv[rows, images] = np.arange(images.shape[1])[None, :]
    return inv


@lru_cache(maxsize=None)
def relative_cycle_matrix(k: int) -> np.ndarray:
    """L[i, j] = l(g_i⁻¹ g_j) sobre a enumeração de sym_images(k)."""
    _check_k(k, MAX_GRAM_K)
    images = sym_images(k)
    inv = _inverse_images(images)
    n = images.shape[0]
    # (g_i⁻¹ ∘ g_j)(x) = inv_i[g_j(x)]
    composed = inv[np.arange(n)[:, None, None], images[None, :, :]]
    counts = cycle_counts(composed.reshape(n * n, k)).reshape(n, n)
    counts.setflags(write=False)
    return counts


def element_cycles(k: int) -> np.ndarray:
    """Vetor l(g) na ordem de sym_images(k)."""
    return cycle_counts(sym_images(k))


def cycle_count(g: Permutation) -> int:
    return g.cycles


def cayley_distance(g: Permutation, h: Permutation) -> int:
    """Dis(g, h) = k − l(g⁻¹h)."""
    if g.k != h.k:
        raise ArgumentError(f"Distância de Cayley requer o mesmo k: {g.k} != {h.k}")
    return g.k - g.inverse().compose(h).cycles


# ---------------------------------------------------------------------------
# Identidades combinatórias
# ---------------------------------------------------------------------------

def rising_factorial(D: int, k: int) -> int:
    """(D+k−1)!/(D−1)! = D(D+1)...(D+k−1), exato."""
    result = 1
    for j in range(k):
        result *= D + j
    return result


def permutation_sum(D: int, k: int) -> int:
    """Σ_{g∈S_k} D^{l(g)} em aritmética inteira."""
    counts = element_cycles(k)
    return sum(int(D) ** int(c) for c in counts)


# ---------------------------------------------------------------------------
# Operadores de permutação
# ---------------------------------------------------------------------------

def perm_operator(
    g: Permutation, n_sites: int, d: int, budget: int = DEFAULT_MOMENT_BUDGET
) -> np.ndarray:
    """Operador que permuta k réplicas de N qudits (dimensão d^{Nk}).

    O conteúdo da réplica u é levado à réplica g(u), de modo que
    perm_operator(g)·perm_operator(h) = perm_operator(g∘h) e
    Tr perm_operator(g) = d^{N·l(g)}.
    """
    D = d ** n_sites
    dim = check_moment_budget(D, g.k, budget)
    k = g.k
    inv = g.inverse().image
    index = np.arange(dim)
    digits = np.unravel_index(index, (D,) * k)
    out_digits = tuple(digits[inv[v]] for v in range(k))
    rows = np.ravel_multi_index(out_digits, (D,) * k)
    op = np.zeros((dim, dim), dtype=complex)
    op[rows, index] = 1.0
    return op


def replica_symmetry_deviation(moment: MomentTensor) -> float:
    """max_g ‖P_g ρ P_g† − ρ‖_max sobre S_k."""
    worst = 0.0
    for g in enumerate_sym(moment.k):
        if g.is_identity():
            continue
        p = perm_operator(g, 1, moment.subsystem_dim, budget=moment.dim)
        worst = max(worst, float(np.max(np.abs(p @ moment.matrix @ p.T - moment.matrix))))
    return worst


# ---------------------------------------------------------------------------
# Coeficientes α(g)
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class AlphaCoefficients:
    """Coeficientes α(g) da expansão em permutações, na ordem de sym_images(k)."""

    k: int
    values: np.ndarray
    context: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (math.factorial(self.k),):
            raise ArgumentError(f"Esperados {math.factorial(self.k)} coeficientes, recebidos {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise NumericError("Coeficientes α(g) não finitos")

    @property
    def elements(self) -> Tuple[Permutation, ...]:
        return enumerate_sym(self.k)

    def __getitem__(self, g: Permutation) -> float:
        return float(self.values[self.elements.index(g)])

    def as_dict(self) -> Dict[Permutation, float]:
        return {g: float(v) for g, v in zip(self.elements, self.values)}

    def by_cycle_type(self) -> Dict[str, float]:
        """Mapa tipo-de-ciclo -> α; α é função de classe para todos os casos aqui tratados."""
        table: Dict[str, float] = {}
        for g, value in zip(self.elements, self.values):
            table.setdefault(g.cycle_type, float(value))
        return table

    def relative(self) -> "AlphaCoefficients":
        """Coeficientes normalizados para α(e) = 1."""
        return AlphaCoefficients(self.k, self.values / self.values[0], dict(self.context))

    def to_json(self) -> dict:
        return {"k": self.k, "context": dict(self.context), "alpha": self.by_cycle_type()}


def _powers(d: float, exponents: np.ndarray) -> np.ndarray:
    return np.power(float(d), np.asarray(exponents, dtype=float))


def _gram(d: int, scale: float, k: int) -> np.ndarray:
    """G_{g,g'} = d^{scale·(l(g⁻¹g') − k)}."""
    return _powers(d, scale * (relative_cycle_matrix(k) - k))


def _solve_gram(gram: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise NumericError(
            f"Matriz de Gram mal condicionada em {what}: número de condição {condition:.3e} > {MAX_CONDITION:.0e}"
        )
    logger.debug("%s: número de condição %.3e", what, condition)
    return scipy.linalg.solve(gram, rhs, assume_a="sym")


def alpha_large_t(m: float, d: int, k: int) -> AlphaCoefficients:
    """Limite t → ∞: α(g) = d^{m(l(g)−k)}."""
    _check_k(k)
    values = _powers(d, m * (element_cycles(k) - k))
    return AlphaCoefficients(k, values, {"d": d, "m": m, "limit": "large-t"})


def solve_alpha_finite_t(t: int, m: float, d: int, k: int) -> AlphaCoefficients:
    """Solução exata de Σ_{g'} G_{g,g'} α(g') = c(g) em tempo finito.

    G_{g,g'} = d^{(t+1)(l(g⁻¹g')−k)} e
    c(g) = Σ_{g'} d^{n(l(g')−k) + n(l(g)−k) + (t+1−n)(l(g⁻¹g')−k)}, com n = m/2.

    Raises:
        ResourceError: k > 6.
        NumericError: Gram com número de condição acima de 1e12.
    """
    _check_k(k, MAX_GRAM_K)
    if t < 0 or m < 0:
        raise ArgumentError(f"t e m devem ser não negativos (t={t}, m={m})")
    n = m / 2.0
    L = relative_cycle_matrix(k)
    lvec = element_cycles(k)
    gram = _gram(d, t + 1, k)
    exponents = n * (lvec[None, :] - k) + n * (lvec[:, None] - k) + (t + 1 - n) * (L - k)
    c = _powers(d, exponents).sum(axis=1)
    values = _solve_gram(gram, c, f"α(t={t}, m={m}, d={d}, k={k})")
    return AlphaCoefficients(k, values, {"d": d, "m": m, "t": t, "limit": "finite-t"})


def alpha_large_d(m: float, d: int, k: int) -> AlphaCoefficients:
    """Duas primeiras ordens em 1/d: α(e)=1, α(transposição)=1/d^m, demais 0 (supõe t > 3m/2)."""
    _check_k(k)
    lvec = element_cycles(k)
    values = np.where(lvec == k, 1.0, np.where(lvec == k - 1, float(d) ** (-m), 0.0))
    return AlphaCoefficients(k, values, {"d": d, "m": m, "limit": "large-d"})


def sparse_alpha(n_pairs: int, d: int, k: int) -> AlphaCoefficients:
    """Apagamentos esparsos em t → ∞: cada par multiplica α(g) por d^{2(l(g)−k)}.

    Partindo de α₀ = 1, resulta α_n(g) = d^{m(l(g)−k)} com m = 2·n_pairs (α(e) = 1).
    """
    _check_k(k)
    if n_pairs < 0:
        raise ArgumentError(f"n_pairs deve ser não negativo, recebido {n_pairs}")
    values = np.ones(math.factorial(k))
    step = _powers(d, 2 * (element_cycles(k) - k))
    for _ in range(n_pairs):
        values = values * step
    return AlphaCoefficients(k, values, {"d": d, "m": 2 * n_pairs, "limit": "sparse"})


def sparse_alpha_finite_t(n_pairs: int, t: int, d: int, k: int) -> AlphaCoefficients:
    """Recursão de apagamentos esparsos em tempo finito, um sistema de Gram por par."""
    _check_k(k, MAX_GRAM_K)
    if n_pairs < 0 or t < 0:
        raise ArgumentError(f"n_pairs e t devem ser não negativos (n_pairs={n_pairs}, t={t})")
    L = relative_cycle_matrix(k)
    lvec = element_cycles(k)
    gram = _gram(d, t + 1, k)
    transfer = _powers(d, lvec[None, :] + lvec[:, None] + t * L - (t + 2) * k)
    values = np.ones(math.factorial(k))
    for i in range(n_pairs):
        values = _solve_gram(gram, transfer @ values, f"par esparso {i + 1}/{n_pairs}")
    return AlphaCoefficients(k, values, {"d": d, "m": 2 * n_pairs, "t": t, "limit": "sparse-finite-t"})


# ---------------------------------------------------------------------------
# Momentos analíticos
# ---------------------------------------------------------------------------

def moment_from_alpha(
    alpha: AlphaCoefficients, N_A: int, d: int, budget: int = DEFAULT_MOMENT_BUDGET
) -> MomentTensor:
    """Σ_g α(g) P_g em N_A sítios, normalizado para traço 1."""
    D = d ** N_A
    check_moment_budget(D, alpha.k, budget)
    matrix = np.zeros((D ** alpha.k, D ** alpha.k), dtype=complex)
    norm = 0.0
    for g, value in zip(alpha.elements, alpha.values):
        if value == 0.0:
            continue
        matrix += value * perm_operator(g, N_A, d, budget)
        norm += value * float(D) ** g.cycles
    if norm == 0.0:
        raise NumericError("Expansão em permutações com traço nulo")
    return MomentTensor(alpha.k, D, matrix / norm, {"source": alpha.context.get("limit", "alpha"), "N_A": N_A, "d": d})


def ghs_weights(N_A: int, m: int, d: int, k: int) -> List[Fraction]:
    """Pesos exatos d^{m·l(g)} / [(D+k−1)!/(D−1)!], D = d^{N_A+m}."""
    normalizer = rising_factorial(d ** (N_A + m), k)
    return [Fraction(d ** (m * int(c)), normalizer) for c in element_cycles(k)]


def ghs_moment(N_A: int, m: int, d: int, k: int, budget: int = DEFAULT_MOMENT_BUDGET) -> MomentTensor:
    """k-ésimo momento do ensemble de Hilbert-Schmidt generalizado.

    Σ_g P_g(N_A) d^{m l(g)} / [(d^{N_A+m}+k−1)!/(d^{N_A+m}−1)!]; o traço é 1 exatamente.
    """
    _check_k(k)
    if m < 0 or N_A < 1:
        raise ArgumentError(f"Requer N_A >= 1 e m >= 0 (N_A={N_A}, m={m})")
    D = d ** N_A
    check_moment_budget(D, k, budget)
    matrix = np.zeros((D ** k, D ** k), dtype=complex)
    for g, weight in zip(enumerate_sym(k), ghs_weights(N_A, m, d, k)):
        matrix += float(weight) * perm_operator(g, N_A, d, budget)
    return MomentTensor(k, D, matrix, {"source": "ghs-analytic", "N_A": N_A, "m": m, "d": d})


# ---------------------------------------------------------------------------
# Correção de próxima ordem e taxas de convergência
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NextOrderCoefficients:
    """Coeficientes normalizados α(g)/C = líder(g) + β(g) + O(d^{−2t})."""

    k: int
    leading: np.ndarray
    beta: np.ndarray
    K: float


def _transposition_indices(k: int) -> List[np.ndarray]:
    """Para cada transposição s_ij, o índice de g·s_ij para todo g."""
    images = sym_images(k)
    lookup = {tuple(row): idx for idx, row in enumerate(images.tolist())}
    result = []
    for i, j in itertools.combinations(range(k), 2):
        swapped = images.copy()
        swapped[:, [i, j]] = swapped[:, [j, i]]  # (g ∘ s_ij)(x) = g(s_ij(x))
        result.append(np.array([lookup[tuple(row)] for row in swapped.tolist()]))
    return result


def alpha_next_order(t: int, m: int, d: int, k: int, N_A: int) -> NextOrderCoefficients:
    """Coeficientes líderes normalizados e a correção β(g) de ordem 1/d^{t+1}."""
    _check_k(k, MAX_GRAM_K)
    n = m / 2.0
    lvec = element_cycles(k).astype(float)
    inv_norm = float(Fraction(1, rising_factorial(d ** (N_A + int(m)), k)))

    bracket = np.zeros_like(lvec)
    for idx in _transposition_indices(k):
        lgs = lvec[idx]
        bracket += _powers(d, n * lvec + n * lgs + n) - _powers(d, 2 * n * lgs)
    K = float(np.sum(_powers(d, N_A * lvec) * bracket))
    leading = _powers(d, m * lvec) * inv_norm
    beta = inv_norm / float(d) ** (t + 1) * (bracket - K * _powers(d, 2 * n * lvec) * inv_norm)
    return NextOrderCoefficients(k, leading, beta, K)


def deviation_prediction(t: int, m: float, d: int, k: int, xi: int) -> float:
    """Δ previsto em N_A grande: (1/d^{t+1})(1/d^m)(1−1/d^m)·k(k−1)/2 (ξ=1) ou com √(k(k−1)/2) (ξ=2)."""
    if xi not in (1, 2):
        raise ArgumentError(f"ξ deve ser 1 ou 2, recebido {xi}")
    pairs = k * (k - 1) / 2.0
    factor = pairs if xi == 1 else math.sqrt(pairs)
    dm = float(d) ** m
    return (1.0 / float(d) ** (t + 1)) * (1.0 / dm) * (1.0 - 1.0 / dm) * factor


def deviation_prediction_report(t: int, m: float, d: int, k: int, xi: int) -> Dict[str, object]:
    """Previsão acompanhada do indicador de regime k(k−1)/2 ≪ d^m."""
    return {
        "t": t, "m": m, "d": d, "k": k, "xi": xi,
        "delta": deviation_prediction(t, m, d, k, xi),
        "small_k_regime": k * (k - 1) / 2.0 < float(d) ** m,
    }


def deviation_bound(
    t: int, m: float, d: int, k: int, N_A: int, xi: int, budget: int = DEFAULT_MOMENT_BUDGET
) -> float:
    """Desvio de primeira ordem ‖Σ_g β(g) P_g‖_ξ / ‖ρ_GHS‖_ξ em N_A finito."""
    if xi not in (1, 2):
        raise ArgumentError(f"ξ deve ser 1 ou 2, recebido {xi}")
    coefficients = alpha_next_order(t, m, d, k, N_A)
    if xi == 2:
        gram = _powers(d, N_A * relative_cycle_matrix(k))
        deviation = math.sqrt(max(float(coefficients.beta @ gram @ coefficients.beta), 0.0))
        reference = math.sqrt(float(coefficients.leading @ gram @ coefficients.leading))
        return deviation / reference

    D = d ** N_A
    check_moment_budget(D, k, budget)
    operator = np.zeros((D ** k, D ** k), dtype=complex)
    for g, value in zip(enumerate_sym(k), coefficients.beta):
        operator += value * perm_operator(g, N_A, d, budget)
    # ‖ρ_GHS‖₁ = 1
    return schatten_norm(operator, 1)


# ---------------------------------------------------------------------------
# Estados globais de Haar
# ---------------------------------------------------------------------------

def global_haar_failure_probability(N_A: int, N_B: int, k: int, d: int, eps: float) -> float:
    """Cota 2 d^{2N_A k} exp(−d^{N_A+N_B} ε² / (18π³(2k−1)² d^{4N_A k})) para Prob[Δ₁ ≥ ε]."""
    exponent = (float(d) ** (N_A + N_B) * eps ** 2) / (
        18 * math.pi ** 3 * (2 * k - 1) ** 2 * float(d) ** (4 * N_A * k)
    )
    return min(1.0, 2 * float(d) ** (2 * N_A * k) * math.exp(-exponent))


def global_haar_bath_bound(N_A: int, k: int, d: int, eps: float, delta: float) -> int:
    """Menor N_B inteiro que garante Δ₁ < ε com probabilidade ≥ 1−δ."""
    if not (0 < eps and 0 < delta < 1):
        raise ArgumentError(f"Requer ε > 0 e 0 < δ < 1 (ε={eps}, δ={delta})")
    inner = 18 * math.pi ** 3 * (2 * k - 1) ** 2 * float(d) ** (4 * N_A * k) / eps ** 2
    inner *= math.log(2 * float(d) ** (2 * N_A * k) / delta)
    return max(0, math.ceil(math.log(inner) / math.log(d)))


# ---------------------------------------------------------------------------
# Entropia condicional recozida
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyResult:
    """Entropia condicional em log natural e em unidades de log d."""

    value: float
    value_log_d: float
    phase: str


def entropy_phase(N_A: int, m: int) -> str:
    if N_A > m:
        return "teleportation"
    if N_A < m:
        return "decoupled"
    return "critical"


def _reference_cycle_counts(k: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """(l(g), l(σ⁻¹g)) para todo g ∈ S_{k+q}, σ = ciclo nos k primeiros elementos."""
    images = sym_images(k + q)
    sigma_inv = np.array(Permutation.cycle(k + q, k).inverse().image)
    return cycle_counts(images), cycle_counts(sigma_inv[images])


def conditional_entropy_analytic(N_A: int, m: int, d: int, k: int, q: int = 1) -> float:
    """I^{(k,q)}_{R:A} no limite t → ∞, em log natural.

    I = −1/(k−1) · log[ Σ_g d^{(1+N_A) l(σ⁻¹g) + m l(g)} / Σ_g d^{(1+m) l(g) + N_A l(σ⁻¹g)} ]
    sobre S_{k+q}, com l(g⁻¹σ) = l(σ⁻¹g).
    """
    if k < 2:
        raise ArgumentError(f"Entropia condicional requer k >= 2, recebido {k}")
    if q < 0:
        raise ArgumentError(f"q deve ser inteiro não negativo, recebido {q}")
    _check_k(k + q)
    lg, lsg = _reference_cycle_counts(k, q)
    numerator = sum(d ** ((1 + N_A) * int(a) + m * int(b)) for a, b in zip(lsg, lg))
    denominator = sum(d ** ((1 + m) * int(b) + N_A * int(a)) for a, b in zip(lsg, lg))
    if numerator == denominator:
        return 0.0
    return -(math.log(numerator) - math.log(denominator)) / (k - 1)


def conditional_entropy_report(N_A: int, m: int, d: int, k: int, q: int = 1) -> EntropyResult:
    value = conditional_entropy_analytic(N_A, m, d, k, q)
    return EntropyResult(value, value / math.log(d), entropy_phase(N_A, m))


def conditional_entropy_finite_t(N_A: int, m: float, d: int, k: int, q: int, t: int) -> float:
    """I^{(k,q)}_{R:A} em tempo finito pelos dois sistemas de Gram sobre S_{k+q}.

    Primeiro a fronteira da referência (σ ou e) fixa α; depois a região perdida
    transfere α em β; o traço final contrai β com σ em A.
    """
    if k < 2 or q < 0:
        raise ArgumentError(f"Requer k >= 2 e q >= 0 (k={k}, q={q})")
    kq = k + q
    _check_k(kq, 5)
    if t + 1 < N_A:
        raise ArgumentError(f"Requer t+1 >= N_A (t={t}, N_A={N_A})")
    n = m / 2.0
    L = relative_cycle_matrix(kq)
    lvec = element_cycles(kq)
    lg, lsg = _reference_cycle_counts(k, q)
    gram = _gram(d, t + 1, kq)
    transfer = _powers(d, (t + 1 - n) * (L - kq) + n * (lvec[:, None] - kq) + n * (lvec[None, :] - kq))
    contraction = _powers(d, N_A * (lsg - kq))

    traces = []
    for boundary in (lsg, lg):  # l(g⁻¹σ) para ρ_AR, l(g⁻¹e) para ρ_A
        alpha = _solve_gram(gram, _powers(d, boundary - kq), f"fronteira da referência (t={t})")
        beta = _solve_gram(gram, transfer @ alpha, f"região perdida (t={t})")
        traces.append(float(contraction @ beta))
    if traces[0] <= 0 or traces[1] <= 0:
        raise NumericError(f"Traços não positivos na entropia de tempo finito: {traces}")
    return -(math.log(traces[0]) - math.log(traces[1])) / (k - 1)
