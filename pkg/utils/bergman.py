"""
Núcleos y medidas de Bergman ponderados a nivel k finito.

En la esfera el espacio adjunto H⁰(kL + K) es O(k-2) con base z^j dz,
j = 0..k-2; para pesos radiales esa base es ortogonal y basta con las
normas N_j = ∫ exp((j+1)s - kφ(s)) ds. Los factores angulares constantes
(2π) se omiten en todo el módulo: se cancelan en las cantidades normalizadas.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec, simpson, trapezoid
from scipy.special import logsumexp, xlogy

from utils.errores import ConvexidadError, CuadraturaError, TrayectoriaInvalidaError
from utils.geodesic import hessiano_diferencias, hessiano_dual, matriz_radial, representacion_radial
from utils.potential_model import COORD_S, VENTANA_DEFECTO, inverse_legendre

logger = logging.getLogger(__name__)

TOL_CUADRATURA = 1e-10
MARGEN_HESSIANO = 2
COORD_RADIO = "radius"


@dataclass(frozen=True, eq=False)
class BergmanSystem:
    """Normas log N_j(t) de la base monomial a lo largo de una trayectoria."""

    k: int
    t_grid: np.ndarray
    s_grid: np.ndarray
    log_normas: np.ndarray
    phi: np.ndarray
    radiales: tuple = ()

    @property
    def exponentes(self):
        return np.arange(self.k - 1)

    def log_nucleo(self, indice_t):
        """G(s) = log Σ_j exp((j+1)s - log N_j(t))."""
        j = self.exponentes
        return logsumexp((j[:, None] + 1) * self.s_grid[None, :] - self.log_normas[indice_t][:, None], axis=0)

    def matriz_log_nucleo(self):
        return np.vstack([self.log_nucleo(i) for i in range(self.t_grid.size)])

    def con_normas(self, log_normas):
        return BergmanSystem(self.k, self.t_grid, self.s_grid, np.asarray(log_normas), self.phi, self.radiales)


@dataclass(frozen=True, eq=False)
class BergmanMeasure:
    k: int
    nodos: np.ndarray
    densidad: np.ndarray
    masa: float
    coordenada: str = COORD_S


def _log_normas_rebanada(u, k, epsrel=1e-12):
    """log N_j por cuadratura adaptativa en la coordenada de momento.

    Con s = L'(x), el exponente es j log x + (k-j-2) log(1-x) + (j+1-kx) g'
    + k g + log(1 + x(1-x) g''). El spline de g es suave dentro de cada celda,
    así que los nodos de la malla se pasan como puntos de corte.
    """
    spl = u.spline
    j = np.arange(k - 1)

    def exponente(x, jj):
        q = 1.0 + x * (1 - x) * spl(x, 2)
        return xlogy(jj, x) + xlogy(k - jj - 2, 1 - x) + (jj + 1 - k * x) * spl(x, 1) + k * spl(x) + np.log(q)

    # el máximo de cada integrando se toma en la malla
    x = u.malla
    maximos = np.max(exponente(x[None, :], j[:, None]), axis=1)

    valores, error = quad_vec(
        lambda xx: np.exp(exponente(xx, j) - maximos),
        0.0, 1.0, epsabs=0.0, epsrel=epsrel, norm="max", points=x[1:-1],
    )
    relativos = error / valores
    peor = int(np.argmax(relativos))
    return maximos + np.log(valores), (float(relativos[peor]), peor)


def log_normas(u, k):
    if k < 3:
        raise ValueError(f"k debe ser al menos 3, se recibió {k}")
    valores, (relativo, j) = _log_normas_rebanada(u, k)
    if relativo > TOL_CUADRATURA:
        raise CuadraturaError("La cuadratura de las normas no convergió", j=j, t=None, error_relativo=relativo)
    return valores


def assemble(path, k, ventana=VENTANA_DEFECTO, nodos=None):
    """Sistema de Bergman de nivel k a lo largo de la trayectoria."""
    if k < 3:
        raise ValueError(f"k debe ser al menos 3, se recibió {k}")
    filas = []
    peor = (0.0, None, None)
    for i, u in enumerate(path.potenciales):
        valores, (relativo, j) = _log_normas_rebanada(u, k)
        if relativo > peor[0]:
            peor = (relativo, j, float(path.t_grid[i]))
        filas.append(valores)
    if peor[0] > TOL_CUADRATURA:
        raise CuadraturaError("La cuadratura de las normas no convergió", j=peor[1], t=peor[2], error_relativo=peor[0])
    logger.debug("Normas de nivel k=%d: peor error relativo %.2e", k, peor[0])
    radiales = tuple(representacion_radial(path, ventana, nodos))
    return BergmanSystem(
        k=k,
        t_grid=path.t_grid,
        s_grid=radiales[0].s_grid,
        log_normas=np.vstack(filas),
        phi=matriz_radial(radiales),
        radiales=radiales,
    )


def _medida(k, s, log_nucleo, phi):
    log_densidad = log_nucleo - k * phi - np.log(k)
    densidad = np.exp(log_densidad)
    return BergmanMeasure(k, s, densidad, float(trapezoid(densidad, s)))


def bergman_measure(sys, indice_t):
    """b_k(s) = (1/k) Σ_j exp((j+1)s - kφ_t(s) - log N_j(t))."""
    return _medida(sys.k, sys.s_grid, sys.log_nucleo(indice_t), sys.phi[indice_t])


def medida_de_potencial(u, k, radial):
    """b_k de un potencial sobre la malla de su representación radial."""
    normas = log_normas(u, k)
    j = np.arange(k - 1)
    log_nucleo = logsumexp((j[:, None] + 1) * radial.s_grid[None, :] - normas[:, None], axis=0)
    return _medida(k, radial.s_grid, log_nucleo, radial.valores)


def tabla_tv(u, k_list, ventana=VENTANA_DEFECTO, nodos=None):
    """[(k, TV(k), masa de b_k)] para cada k."""
    radial = inverse_legendre(u, ventana, nodos)
    filas = []
    for k in k_list:
        medida = medida_de_potencial(u, k, radial)
        tv = float(trapezoid(np.abs(medida.densidad - radial.curvatura), radial.s_grid))
        logger.info("TV(k=%d) = %.6e (masa %.10f)", k, tv, medida.masa)
        filas.append((k, tv, medida.masa))
    return filas


def tv_convergence(u, k_list, ventana=VENTANA_DEFECTO, nodos=None):
    """TV(k) = ∫ |b_k - φ''| ds en la ventana, para cada k."""
    return [tv for _, tv, _ in tabla_tv(u, k_list, ventana, nodos)]


def cota_uniforme(u, k_list, radio=5.0, ventana=VENTANA_DEFECTO, nodos=None):
    """max_k sup_{|s| ≤ radio} b_k."""
    radial = inverse_legendre(u, ventana, nodos)
    dentro = np.abs(radial.s_grid) <= radio
    return max(float(np.max(medida_de_potencial(u, k, radial).densidad[dentro])) for k in k_list)


# ---------------------------------------------------------------------------
# Variación plurisubarmónica
# ---------------------------------------------------------------------------

def _exigir_nodos_t(sys, minimo=2 * MARGEN_HESSIANO + 1):
    if sys.t_grid.size < minimo:
        raise TrayectoriaInvalidaError(f"Se necesitan al menos {minimo} nodos en t para el escaneo de hessianos")


def psh_variation_check(sys):
    """Mínimo autovalor del hessiano (t, s) de G, sin las 2 capas del borde."""
    _exigir_nodos_t(sys)
    hess = hessiano_diferencias(sys.matriz_log_nucleo(), sys.t_grid, sys.s_grid).recortar(MARGEN_HESSIANO - 1)
    minimo = float(np.min(hess.autovalor_minimo()))
    logger.info("Variación psh (k=%d): autovalor mínimo %.3e", sys.k, minimo)
    return minimo


def decomposition_inequality(sys, path):
    """Mínimo autovalor de Hess(log b_k) + k·Hess(Φ)."""
    _exigir_nodos_t(sys)
    if path.n_t != sys.t_grid.size:
        raise TrayectoriaInvalidaError("La trayectoria no corresponde al sistema")
    log_b = sys.matriz_log_nucleo() - sys.k * sys.phi - np.log(sys.k)
    hess_b = hessiano_diferencias(log_b, sys.t_grid, sys.s_grid)
    hess_phi = hessiano_diferencias(sys.phi, sys.t_grid, sys.s_grid)
    suma = type(hess_b)(
        hess_b.t, hess_b.s,
        hess_b.tt + sys.k * hess_phi.tt,
        hess_b.ts + sys.k * hess_phi.ts,
        hess_b.ss + sys.k * hess_phi.ss,
    ).recortar(MARGEN_HESSIANO - 1)
    return float(np.min(suma.autovalor_minimo()))


def convexidad_normas(sys):
    """Mínima segunda diferencia en t de -log N_j(t) (convexa a lo largo de geodésicas)."""
    if sys.t_grid.size < 3:
        return 0.0
    dt = sys.t_grid[1] - sys.t_grid[0]
    return float(np.min(-np.diff(sys.log_normas, 2, axis=0) / dt**2))


def falsear_normas(sys, amplitud=5.0):
    """Control de mutación: suma un bache convexo amplitud·t(t-1) a cada log N_j."""
    t = sys.t_grid
    return sys.con_normas(sys.log_normas + amplitud * (t * (t - 1))[:, None])


def margen_truncamiento(sys, k0=2):
    """χ - log b_k en los nodos interiores de la malla (t, s), con χ = s - k0·Φ.

    Ψ_{A,k} toma la rama truncada donde este margen supera A.
    """
    log_b = sys.matriz_log_nucleo() - sys.k * sys.phi - np.log(sys.k)
    chi = sys.s_grid[None, :] - k0 * sys.phi
    return (chi - log_b)[1:-1, 1:-1]


def _recorte(matriz):
    margen = MARGEN_HESSIANO - 1
    return matriz[margen:-margen, margen:-margen]


def nodos_truncados(sys, A, k0=2):
    """Nodos del escaneo donde Ψ_{A,k} usa la rama χ - A."""
    if not np.isfinite(A):
        return 0
    return int(np.count_nonzero(_recorte(margen_truncamiento(sys, k0)) > A))


def barrido_truncamiento(sys, fracciones=(0.75, 0.5, 0.25), k0=2):
    """Valores de A que truncan cada fracción de los nodos del escaneo."""
    margen = _recorte(margen_truncamiento(sys, k0))
    return [float(np.quantile(margen, 1.0 - f)) for f in fracciones]


def mixed_positivity(sys, path, A=np.inf, k0=2):
    """Mínimo de MD(Hess Ψ_{A,k}, Hess Φ) con Ψ_{A,k} = max(log b_k, χ - A).

    χ = s - k0·Φ. Hess Φ se toma de las fórmulas duales; Hess log b_k se
    escribe como Hess G - k·Hess Φ en la rama activa de cada nodo.
    """
    _exigir_nodos_t(sys)
    if not sys.radiales:
        raise TrayectoriaInvalidaError("El sistema no conserva las representaciones radiales")
    G = sys.matriz_log_nucleo()
    hess_g = hessiano_diferencias(G, sys.t_grid, sys.s_grid)
    hess_phi = hessiano_dual(path, list(sys.radiales))
    k = sys.k
    tt = hess_g.tt - k * hess_phi.tt
    ts = hess_g.ts - k * hess_phi.ts
    ss = hess_g.ss - k * hess_phi.ss
    if np.isfinite(A):
        truncado = margen_truncamiento(sys, k0) > A
        if np.any(truncado):
            logger.debug("Truncamiento A=%.3g activo en %d nodos", A, int(truncado.sum()))
        tt = np.where(truncado, -k0 * hess_phi.tt, tt)
        ts = np.where(truncado, -k0 * hess_phi.ts, ts)
        ss = np.where(truncado, -k0 * hess_phi.ss, ss)
    hess_psi = type(hess_g)(hess_g.t, hess_g.s, tt, ts, ss)
    minimo = float(np.min(_recorte(hess_psi.emparejamiento_mixto(hess_phi))))
    logger.info("Positividad mixta (k=%d, A=%s): mínimo %.3e", k, A, minimo)
    return minimo



# ---------------------------------------------------------------------------
# Disco unidad
# ---------------------------------------------------------------------------

def perfil_pegado_disco(r, delta=0.05):
    """max(|z|², 1/4) suavizado con un empalme cuadrático en ρ = r²."""
    rho = np.asarray(r, dtype=float) ** 2
    empalme = 0.25 + (rho - 0.25 + delta) ** 2 / (4 * delta)
    return np.where(rho <= 0.25 - delta, 0.25, np.where(rho >= 0.25 + delta, rho, empalme))


def disc_bergman(phi, k, tol=1e-8):
    """Medida de Bergman del disco con peso radial φ(r) muestreado en [0, 1]."""
    phi = np.asarray(phi, dtype=float)
    r = np.linspace(0.0, 1.0, phi.size)
    dr = r[1] - r[0]
    # laplaciano radial φ'' + φ'/r; en el origen vale 2φ''(0)
    laplaciano = np.empty(phi.size - 1)
    laplaciano[0] = 4 * (phi[1] - phi[0]) / dr**2
    interior = slice(1, -1)
    segunda = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / dr**2
    primera = (phi[2:] - phi[:-2]) / (2 * dr)
    laplaciano[1:] = segunda + primera / r[interior]
    escala = max(1.0, float(np.max(np.abs(laplaciano))))
    malos = np.flatnonzero(laplaciano < -tol * escala)
    if malos.size:
        raise ConvexidadError("El peso del disco no es subarmónico", nodo=int(malos[0]))

    j = np.arange(k)
    exponentes = xlogy(2 * j[:, None] + 1, r[None, :]) - k * phi[None, :]
    maximos = exponentes.max(axis=1)
    log_n = maximos + np.log(simpson(np.exp(exponentes - maximos[:, None]), x=r, axis=1))
    log_densidad = logsumexp(xlogy(2 * j[:, None], r[None, :]) - log_n[:, None], axis=0) - k * phi - np.log(2 * np.pi * k)
    densidad = np.exp(log_densidad)
    masa = float(trapezoid(densidad * 2 * np.pi * r, r))
    return BergmanMeasure(k, r, densidad, masa, COORD_RADIO)
