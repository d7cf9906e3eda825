"""
Funcionales escalares sobre potenciales: energías, entropía, K-energía de
Mabuchi, variantes con torsión y energía de Calabi; y los escaneos de
convexidad y de variación que las verifican.

Convención: u + t·v se realiza como g - t·v (``perturb``), de modo que las
derivadas en t se emparejan con v en las fórmulas de los diferenciales.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.linalg import eigh
from scipy.special import expit, logsumexp, rel_entr

from utils.errores import MallaIncompatibleError, ToleranciaError, TrayectoriaInvalidaError
from utils.geodesic import (
    hessiano_diferencias,
    hessiano_dual,
    mabuchi_distance,
    representacion_radial,
)
from utils.potential_model import (
    COORD_MOMENTO,
    COORD_S,
    R_BARRA,
    VENTANA_DEFECTO,
    GridMeasure,
    TwistForm,
    _punto_dual,
    moment_of,
    perturb,
    pesos_trapecio,
    potential_at,
    ricci_reference,
    scalar_curvature,
)

logger = logging.getLogger(__name__)

PISO_DENSIDAD = 1e-14
TOL_CONVEXIDAD_RELATIVA = 1e-6
LIMITE_DENSIDAD = 1e8


@dataclass(frozen=True, eq=False)
class FunctionalReport:
    """Valores de un funcional a lo largo de una trayectoria y sus cocientes de diferencias."""

    t_grid: np.ndarray
    valores: np.ndarray
    primeras: np.ndarray
    segundas: np.ndarray
    min_segunda: float

    @classmethod
    def desde_valores(cls, t_grid, valores):
        t = np.asarray(t_grid, dtype=float)
        valores = np.asarray(valores, dtype=float)
        dt = t[1] - t[0]
        primeras = np.diff(valores) / dt
        segundas = np.diff(valores, 2) / dt**2
        minimo = float(segundas.min()) if segundas.size else 0.0
        return cls(t, valores, primeras, segundas, minimo)

    @property
    def escala(self):
        return max(1.0, float(np.max(np.abs(self.valores))))

    def holgura(self, tol=TOL_CONVEXIDAD_RELATIVA):
        """min_segunda + tol·escala; no negativa si el escaneo es convexo."""
        return self.min_segunda + tol * self.escala

    def cumple(self, tol=TOL_CONVEXIDAD_RELATIVA):
        return self.holgura(tol) >= 0

    def a_dataframe(self):
        n = self.t_grid.size
        d1 = np.full(n, np.nan)
        d2 = np.full(n, np.nan)
        d1[:-1] = self.primeras
        d2[1:-1] = self.segundas
        return pd.DataFrame({"t": self.t_grid, "value": self.valores, "d1": d1, "d2": d2})


# ---------------------------------------------------------------------------
# Energías
# ---------------------------------------------------------------------------

def energy_e(u):
    """𝓔(u) = ∫ u (ω_u + ω_0) en coordenadas reducidas."""
    return float(trapezoid(u.kahler, u.malla) + trapezoid(u.kahler, u.momento_fs))


def integrar_potencial(u, medida):
    """∫ u dμ para una medida en el eje s o en la coordenada de momento de ω_0."""
    if isinstance(medida, TwistForm):
        medida = medida.como_medida()
    if medida.coordenada == COORD_S:
        valores = potential_at(u, medida.nodos)
    else:
        valores = u.kahler_en(moment_of(u, medida.nodos))
    return medida.integrar(valores)


def energy_et(u, T):
    """𝓔^T(u) = ∫ u dT."""
    return integrar_potencial(u, T)


def energia_ricci(u, ventana=VENTANA_DEFECTO):
    return energy_et(u, ricci_reference(ventana, 4 * u.n + 1))


def entropy(mu, mu0, piso=PISO_DENSIDAD):
    """H_{μ0}(μ) = ∫ log(dμ/dμ0) dμ, con 0·log 0 = 0."""
    if mu.nodos.shape != mu0.nodos.shape or not np.allclose(mu.nodos, mu0.nodos, rtol=0, atol=1e-14):
        raise MallaIncompatibleError("La entropía necesita ambas medidas en la misma malla")
    p, q = mu.densidad, mu0.densidad
    # ambos por debajo del piso: el nodo no aporta
    enmascarados = (p < piso) & (q < piso)
    if np.any(enmascarados):
        logger.debug("Entropía: %d nodos enmascarados bajo el piso %.1e", int(enmascarados.sum()), piso)
    integrando = np.where(enmascarados, 0.0, rel_entr(p, q))
    if np.any(np.isinf(integrando)):
        nodo = int(np.flatnonzero(np.isinf(integrando))[0])
        logger.warning("μ carga el nodo %d donde μ0 se anula; entropía = +inf", nodo)
        return float("inf")
    return float(trapezoid(integrando, mu.nodos))


def entropy_legendre_gap(mu, mu0, f):
    """H(μ) - (∫ f dμ - log ∫ e^f dμ0); no negativo por la dualidad de Legendre."""
    f = np.asarray(f, dtype=float)
    log_integral = logsumexp(f, b=pesos_trapecio(mu0.nodos) * mu0.densidad)
    return entropy(mu, mu0) - (mu.integrar(f) - log_integral)


def entropy_convexity_gap(mu_a, mu_b, mu0, s):
    """H(sμ_b + (1-s)μ_a) - [sH(μ_b) + (1-s)H(μ_a)]; no positivo."""
    mezcla = GridMeasure(mu_a.coordenada, mu_a.nodos, s * mu_b.densidad + (1 - s) * mu_a.densidad)
    return entropy(mezcla, mu0) - (s * entropy(mu_b, mu0) + (1 - s) * entropy(mu_a, mu0))


def entropy_lsc_gap(mu, mu0, epsilons=(1e-2, 1e-3, 1e-4), semilla=0):
    """H(μ_ε) - H(μ) para la menor ε de una sucesión μ_ε → μ en L¹."""
    rng = np.random.default_rng(semilla)
    ruido = rng.uniform(-1.0, 1.0, mu.nodos.size)
    base = entropy(mu, mu0)
    diferencias = []
    for eps in epsilons:
        densidad = mu.densidad * (1 + eps * ruido)
        densidad = densidad / trapezoid(densidad, mu.nodos) * mu.masa
        diferencias.append(entropy(GridMeasure(mu.coordenada, mu.nodos, densidad), mu0) - base)
    logger.debug("Semicontinuidad de la entropía: %s", diferencias)
    return float(diferencias[-1])


def medidas_reducidas(u):
    """(ω_u, ω_0) como densidades sobre la malla de momento de u."""
    volumen = GridMeasure(COORD_MOMENTO, u.malla, np.ones(u.n + 1))
    referencia = GridMeasure(COORD_MOMENTO, u.malla, np.exp(u.log_jacobiano))
    return volumen, referencia


def mabuchi(u, ventana=VENTANA_DEFECTO):
    """𝓜(u) = (R̄/2)·𝓔(u) - 𝓔^{Ric ω_0}(u) + H_{ω_0}(ω_u)."""
    volumen, referencia = medidas_reducidas(u)
    return R_BARRA / 2 * energy_e(u) - energia_ricci(u, ventana) + entropy(volumen, referencia)


def mabuchi_toric(u):
    """Forma simpléctica de la K-energía: -∫ log q dx + g(0) + g(1) - 2∫ g dx."""
    g = u.valores
    return float(-np.sum(u.pesos * np.log(u.factor_hessiano)) + g[0] + g[-1] - 2 * np.sum(u.pesos * g))


def aplicar_d2_transpuesta(v_interior, dx):
    """D₂ᵀ v para el operador de segundas diferencias interiores D₂: (N-1)×(N+1)."""
    resultado = np.zeros(v_interior.size + 2)
    resultado[:-2] += v_interior
    resultado[1:-1] -= 2 * v_interior
    resultado[2:] += v_interior
    return resultado / dx**2


def mabuchi_gradient(u):
    """Gradiente débil de 𝓜 en la dirección de Kähler: G·w ≈ ∫ w (R̄ - S) dx."""
    G = aplicar_d2_transpuesta(u.dx * u.h[1:-1], u.dx)
    G[0] -= 1.0
    G[-1] -= 1.0
    return G + R_BARRA * u.pesos


def calabi_energy(u):
    """𝓒(u) = ∫ (S - R̄)² dx."""
    S = scalar_curvature(u)
    return float(trapezoid((S - R_BARRA) ** 2, u.malla))


def curvatura_media(u):
    return float(trapezoid(scalar_curvature(u), u.malla))


def twisted_f_mu(u, mu):
    """𝓕_μ(u) = ∫ u dμ - (masa(μ)/2)·𝓔(u)."""
    return integrar_potencial(u, mu) - mu.masa / 2 * energy_e(u)


def twisted_f_alpha(u, alpha):
    """𝓕_α(u) = 𝓔^α(u) - (masa(α)/2)·𝓔(u)."""
    return integrar_potencial(u, alpha.como_medida()) - alpha.masa / 2 * energy_e(u)


def mabuchi_twisted(u, alpha, ventana=VENTANA_DEFECTO):
    return mabuchi(u, ventana) + twisted_f_alpha(u, alpha)


# ---------------------------------------------------------------------------
# Diferenciales y comprobaciones por diferencias finitas
# ---------------------------------------------------------------------------

def emparejamiento_energia(u, v):
    """d𝓔·v = 2∫ v dω_u."""
    return 2 * float(trapezoid(v, u.malla))


def emparejamiento_energia_t(u, v, T):
    """d𝓔^T·v = ∫ v dT, con v dada en la malla de momento de u."""
    if isinstance(T, TwistForm):
        T = T.como_medida()
    if T.coordenada == COORD_S:
        x = expit(_punto_dual(u, T.nodos))
    else:
        x = moment_of(u, T.nodos)
    return T.integrar(np.interp(x, u.malla, v))


def emparejamiento_mabuchi(u, v):
    """d𝓜·v = ∫ v (R̄ - S) dω_u."""
    S = scalar_curvature(u)
    return float(trapezoid(v * (R_BARRA - S), u.malla))


def derivada_fd(funcional, u, v, h):
    """Diferencia centrada de t ↦ funcional(u + t·v) en t = 0."""
    return (funcional(perturb(u, v, h)) - funcional(perturb(u, v, -h))) / (2 * h)


def orden_observado(funcional, u, v, h=1e-3, piso=1e-11):
    """Orden observado de la derivada por diferencias con pasos h, h/2, h/4.

    Devuelve inf cuando las diferencias sucesivas quedan bajo el piso de
    redondeo (funcional cuadrático o afín a lo largo de la dirección, o
    derivada nula); en ese caso la diferencia centrada ya es exacta.
    """
    d = [derivada_fd(funcional, u, v, h / 2**i) for i in range(3)]
    primera, segunda = abs(d[0] - d[1]), abs(d[1] - d[2])
    escala = max(1.0, abs(d[2]))
    if segunda <= piso * escala or primera <= piso * escala:
        return float("inf"), d[2]
    return float(np.log2(primera / segunda)), d[2]


# ---------------------------------------------------------------------------
# Escaneos a lo largo de trayectorias
# ---------------------------------------------------------------------------

def subharmonicity_scan(path, ventana=VENTANA_DEFECTO):
    """FunctionalReport de 𝓜 a lo largo de cualquier trayectoria."""
    valores = [mabuchi(u, ventana) for u in path.potenciales]
    reporte = FunctionalReport.desde_valores(path.t_grid, valores)
    logger.info(
        "Escaneo de 𝓜 (%s, %d nodos): mínima segunda diferencia %.3e (escala %.3g)",
        path.tipo, path.n_t, reporte.min_segunda, reporte.escala,
    )
    return reporte


def convexity_scan(path, ventana=VENTANA_DEFECTO, tol=TOL_CONVEXIDAD_RELATIVA):
    """Convexidad de 𝓜 a lo largo de una geodésica débil."""
    if path.tipo != "geodesic":
        raise TrayectoriaInvalidaError(
            f"convexity_scan solo acepta geodésicas (se recibió '{path.tipo}'); use subharmonicity_scan"
        )
    reporte = subharmonicity_scan(path, ventana)
    if not reporte.cumple(tol):
        logger.warning("𝓜 no es convexa dentro de la tolerancia: holgura %.3e", reporte.holgura(tol))
    return reporte


def escaneo_energias(path, alpha=None, ventana=VENTANA_DEFECTO):
    """Reportes de 𝓔, 𝓔^{Ric} y (opcional) 𝓔^α a lo largo de la trayectoria."""
    reportes = {
        "energia": FunctionalReport.desde_valores(path.t_grid, [energy_e(u) for u in path.potenciales]),
        "energia_ricci": FunctionalReport.desde_valores(
            path.t_grid, [energia_ricci(u, ventana) for u in path.potenciales]
        ),
    }
    if alpha is not None:
        reportes["energia_alpha"] = FunctionalReport.desde_valores(
            path.t_grid, [energy_et(u, alpha) for u in path.potenciales]
        )
    return reportes


def _minimo_vecindad(valores):
    """Mínimo sobre el bloque 3×3 alrededor de cada nodo interior."""
    bloques = [valores[i:valores.shape[0] - 2 + i, j:valores.shape[1] - 2 + j] for i in range(3) for j in range(3)]
    return np.minimum.reduce(bloques)


def integrando_segunda_variacion(path, ventana=VENTANA_DEFECTO, nodos=None, piso=PISO_DENSIDAD):
    """MD(Hess Ψ, Hess Φ) en los nodos interiores, con Ψ = log φ_t''.

    Devuelve (hessiano de Ψ, integrando, máscara de nodos válidos).
    """
    radiales = representacion_radial(path, ventana, nodos)
    s = radiales[0].s_grid
    curvaturas = np.vstack([p.curvatura for p in radiales])
    with np.errstate(divide="ignore"):
        psi = np.log(curvaturas)
    validos = _minimo_vecindad(curvaturas) >= piso
    psi = np.where(np.isfinite(psi), psi, np.log(piso))
    hess_psi = hessiano_diferencias(psi, path.t_grid, s)
    hess_phi = hessiano_dual(path, radiales)
    integrando = np.where(validos, hess_psi.emparejamiento_mixto(hess_phi), 0.0)
    enmascarados = int((~validos).sum())
    if enmascarados:
        logger.warning("Segunda variación: %d nodos con φ'' < %.0e enmascarados", enmascarados, piso)
    return hess_psi, integrando, validos


def second_variation_check(path, ventana=VENTANA_DEFECTO, nodos=None):
    """max_t |d²𝓜/dt² - ∫ MD(Hess Ψ, Hess Φ) ds| sobre los nodos t interiores."""
    if path.n_t < 3:
        raise TrayectoriaInvalidaError("La segunda variación necesita al menos 3 nodos en t")
    hess_psi, integrando, _ = integrando_segunda_variacion(path, ventana, nodos)
    lado_derecho = trapezoid(integrando, hess_psi.s, axis=1)
    valores = np.array([mabuchi(u, ventana) for u in path.potenciales])
    lado_izquierdo = np.diff(valores, 2) / path.dt**2
    discrepancia = float(np.max(np.abs(lado_izquierdo - lado_derecho)))
    logger.info("Segunda variación: discrepancia %.3e", discrepancia)
    return discrepancia


def subslope_check(u0, u1, tol=1e-4, paso=1e-3, ventana=VENTANA_DEFECTO):
    """(𝓜(u1) - 𝓜(u0), -d(u0, u1)·√𝓒(u0), holgura)."""
    u0.exigir_misma_malla(u1)
    if np.array_equal(u0.valores, u1.valores):
        return 0.0, 0.0, 0.0
    m0 = mabuchi(u0, ventana)
    lhs = mabuchi(u1, ventana) - m0
    d = mabuchi_distance(u0, u1, ventana=ventana)
    rhs = -d * np.sqrt(calabi_energy(u0))

    # f'(0⁺) a lo largo de la geodésica g_0 + τΔ, con extrapolación de Richardson
    delta = u1.valores - u0.valores
    def f(tau):
        return mabuchi(perturb(u0, -delta, tau), ventana)
    d_paso = (f(paso) - m0) / paso
    d_medio = (f(paso / 2) - m0) / (paso / 2)
    pendiente = 2 * d_medio - d_paso
    emparejamiento = emparejamiento_mabuchi(u0, -delta)
    logger.debug("Subpendiente: f'(0+)=%.6e, emparejamiento=%.6e", pendiente, emparejamiento)
    if pendiente < emparejamiento - tol:
        raise ToleranciaError("pendiente inicial de 𝓜", pendiente - emparejamiento, tol)
    return float(lhs), float(rhs), float(lhs - rhs)


# ---------------------------------------------------------------------------
# Convexidad estricta de ∫ u dμ
# ---------------------------------------------------------------------------

def constante_poincare(mu, nodos_max=1025):
    """Segundo autovalor generalizado de ∫ y(1-y) f'² dμ frente a ∫ f² dμ en la coordenada y."""
    medida = mu.en_momento()
    if medida.nodos.size > nodos_max:
        y = np.linspace(0.0, 1.0, nodos_max)
        densidad = np.interp(y, medida.nodos, medida.densidad)
    else:
        y, densidad = medida.nodos, medida.densidad
    dy = np.diff(y)
    medio = 0.5 * (y[1:] + y[:-1])
    a = medio * (1 - medio) * 0.5 * (densidad[1:] + densidad[:-1]) / dy
    n = y.size
    K = np.zeros((n, n))
    indices = np.arange(n - 1)
    K[indices, indices] += a
    K[indices + 1, indices + 1] += a
    K[indices, indices + 1] -= a
    K[indices + 1, indices] -= a
    M = np.diag(pesos_trapecio(y) * densidad)
    autovalores = eigh(K, M, eigvals_only=True, subset_by_index=[0, 1])
    delta = float(autovalores[1])
    logger.info("Constante de Poincaré estimada: %.6f", delta)
    return delta


def strict_convexity_imu(path, mu, tol=1e-6, ventana=VENTANA_DEFECTO):
    """(f'(1) - f'(0), δ·A/C²·d²) para f(t) = ∫ u_t dμ."""
    if path.tipo not in ("geodesic", "subgeodesic"):
        raise TrayectoriaInvalidaError("La convexidad estricta requiere una (sub)geodésica")
    n = path.n_t
    if n < 3:
        raise TrayectoriaInvalidaError("Se necesitan al menos 3 nodos en t")
    dt = path.dt

    def f(i):
        return integrar_potencial(path.potenciales[i], mu)

    f0, f1, f2 = f(0), f(1), f(2)
    g0, g1, g2 = f(n - 1), f(n - 2), f(n - 3)
    derivada_inicio = 2 * (f1 - f0) / dt - (f2 - f0) / (2 * dt)
    derivada_fin = 2 * (g0 - g1) / dt - (g0 - g2) / (2 * dt)
    brecha = derivada_fin - derivada_inicio

    C = max(float(np.max(np.exp(-u.log_jacobiano))) for u in path.potenciales)
    if not np.isfinite(C) or C > LIMITE_DENSIDAD:
        raise ToleranciaError("cota de densidad C", C, LIMITE_DENSIDAD)
    A = float(np.min(mu.en_momento().densidad))
    delta = path.fin.valores - path.inicio.valores
    x = path.inicio.malla
    d2 = float(trapezoid((delta - trapezoid(delta, x)) ** 2, x))
    cota = constante_poincare(mu) * A / C**2 * d2 if d2 > 0 else 0.0
    logger.info("Convexidad estricta: brecha %.6e, cota %.6e (A=%.3g, C=%.3g)", brecha, cota, A, C)
    if brecha < cota - tol:
        raise ToleranciaError("convexidad estricta de ∫u dμ", brecha - cota, tol)
    return float(brecha), float(cota)
