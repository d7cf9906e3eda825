"""
Campos gradiente holomorfos del modelo, hamiltonianos, operador de
Lichnerowicz y los experimentos de perturbación y unicidad.

El campo modelo es V = c·z∂/∂z. Im V actúa trivialmente sobre datos
radiales, así que todo potencial del laboratorio es invariante por su flujo;
el flujo de Re V traslada s y se realiza como g ↦ g - 2c·t·x.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline
from scipy.linalg import solve
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit, logit

from utils.errores import (
    CompatibilidadError,
    ConvergenciaError,
    ConvexidadError,
    ResolucionError,
    ToleranciaError,
)
from utils.functionals import (
    FunctionalReport,
    mabuchi_gradient,
    mabuchi_toric,
    twisted_f_mu,
)
from utils.geodesic import MetricPath, orbit_slice
from utils.potential_model import (
    N_MINIMO,
    R_BARRA,
    VENTANA_DEFECTO,
    SymplecticPotential,
    densidad_en_momento_de,
    inverse_legendre,
    moment_of,
    pesos_trapecio,
    scalar_curvature,
)

logger = logging.getLogger(__name__)

TOL_COMPATIBILIDAD = 1e-6
TOL_CRITICO = 1e-8
RESIDUO_TWISTED = 1e-5


@dataclass(frozen=True)
class GradientField:
    """Campo radial V = escala·z∂/∂z."""

    nombre: str = "z_dz"
    escala: float = 1.0

    def hamiltonian_in_x(self, malla):
        """Hamiltoniano afín en la coordenada de momento, de media cero."""
        return self.escala * (np.asarray(malla) - 0.5)

    def escalado(self, factor):
        return GradientField(self.nombre, self.escala * factor)


@dataclass(frozen=True, eq=False)
class LinearOperatorOnFunctions:
    """Forma cuadrática Q = D₂ᵀ·diag(Δx·h²)·D₂ sobre funciones en la malla de momento.

    El operador 𝔇*𝔇 es Q dividido por los pesos del trapecio, autoadjunto en el
    producto interno ponderado por ω_u.
    """

    matriz: np.ndarray
    pesos: np.ndarray
    malla: np.ndarray
    raiz_pesos_d: np.ndarray = field(repr=False)

    def forma(self, v, w):
        """H_𝓜(v, w)."""
        return float(np.asarray(v) @ self.matriz @ np.asarray(w))

    def aplicar(self, v):
        return self.matriz @ np.asarray(v) / self.pesos

    def aplicar_d(self, v):
        """Muestras de 𝔇v en los nodos interiores (Q = 𝔇ᵀ𝔇)."""
        v = np.asarray(v)
        dx = self.malla[1] - self.malla[0]
        segundas = (v[2:] - 2 * v[1:-1] + v[:-2]) / dx**2
        return self.raiz_pesos_d * segundas

    def residuo_autoadjunto(self):
        return float(np.max(np.abs(self.matriz - self.matriz.T)) / np.max(np.abs(self.matriz)))

    def nucleo(self):
        """Base euclídea del núcleo: constantes y la hamiltoniana del campo modelo."""
        return np.column_stack([np.ones_like(self.malla), self.malla - 0.5])


@dataclass(frozen=True, eq=False)
class SolucionLinealizada:
    v: np.ndarray
    residuo: float
    emparejamientos: tuple


# ---------------------------------------------------------------------------
# Hamiltonianos y emparejamientos
# ---------------------------------------------------------------------------

def _contraccion(V, u, radial):
    """c·∂_sφ_u evaluado en los nodos de momento de u (sin normalizar)."""
    h = np.empty(u.n + 1)
    h[1:-1] = V.escala * radial.spline(u.coordenada_s[1:-1], 1)
    h[0], h[-1] = 0.0, V.escala
    return h


def hamiltonian(V, u, ventana=VENTANA_DEFECTO, nodos=None):
    """h^V_{ω_u} por la contracción c·∂_sφ_u en coordenadas reducidas, de media cero."""
    h = _contraccion(V, u, inverse_legendre(u, ventana, nodos))
    return h - trapezoid(h, u.malla)


def hamiltonian_shift_residual(V, u, ventana=VENTANA_DEFECTO, nodos=None):
    """max_s |h^V_{ω_u} - (h^V_{ω_0} + V(u))| en el eje s."""
    radial = inverse_legendre(u, ventana, nodos)
    s = radial.s_grid
    media_u = trapezoid(_contraccion(V, u, radial), u.malla)
    lado_u = V.escala * radial.spline(s, 1) - media_u
    # V(u) = c·∂_s u con u = φ_u - φ_FS y φ_FS = log(1 + e^s)
    diferencia = CubicSpline(s, radial.valores - np.logaddexp(0.0, s))
    lado_0 = V.hamiltonian_in_x(expit(s)) + V.escala * diferencia(s, 1)
    return float(np.max(np.abs(lado_u - lado_0)))


def ibp_identity_check(u_s, v_s, w, ventana=VENTANA_DEFECTO, nodos=None, refinamiento=8):
    """|∫ v u'' ds + ∫ u_x v_x / L''_w dx| para funciones radiales u, v dadas en el eje s.

    Los dos lados se integran con el mismo trapecio en la coordenada de
    momento de w, sobre una malla refinada y recortada a la ventana.
    """
    radial = inverse_legendre(w, ventana, nodos)
    su = CubicSpline(radial.s_grid, u_s)
    sv = CubicSpline(radial.s_grid, v_s)
    x = np.linspace(0.0, 1.0, refinamiento * w.n + 1)[1:-1]
    spl = w.spline
    s = logit(x) + spl(x, 1)
    L2 = 1.0 / (x * (1 - x)) + spl(x, 2)
    dentro = np.abs(s) <= radial.s_grid[-1]
    x, s, L2 = x[dentro], s[dentro], L2[dentro]
    # ds = L'' dx, y u_x v_x / L'' = u'(s) v'(s) L''
    lhs = trapezoid(sv(s) * su(s, 2) * L2, x)
    rhs = -trapezoid(su(s, 1) * sv(s, 1) * L2, x)
    return float(abs(lhs - rhs))


def inner_product(V, W, u, ventana=VENTANA_DEFECTO, nodos=None):
    """⟨V, W⟩_{ω_u} = ∫ h^V h^W dω_u."""
    return float(trapezoid(hamiltonian(V, u, ventana, nodos) * hamiltonian(W, u, ventana, nodos), u.malla))


def futaki(V, u, ventana=VENTANA_DEFECTO, nodos=None):
    """∫ (S - R̄) h^V dω_u."""
    S = scalar_curvature(u)
    return float(trapezoid((S - R_BARRA) * hamiltonian(V, u, ventana, nodos), u.malla))


def energy_ev(path, V, ventana=VENTANA_DEFECTO, nodos=None):
    """𝓔_V(u_t) integrando d𝓔_V·u̇ = ∫ u̇ h^V dω por el punto medio entre nodos."""
    hamiltonianos = [hamiltonian(V, u, ventana, nodos) for u in path.potenciales]
    x = path.inicio.malla
    valores = [0.0]
    for i in range(path.n_t - 1):
        # u̇ dt = -(g_{i+1} - g_i) en coordenadas de momento
        incremento = -(path.matriz[i + 1] - path.matriz[i])
        h_medio = 0.5 * (hamiltonianos[i] + hamiltonianos[i + 1])
        valores.append(valores[-1] + trapezoid(incremento * h_medio, x))
    return FunctionalReport.desde_valores(path.t_grid, valores)


# ---------------------------------------------------------------------------
# Operador de Lichnerowicz
# ---------------------------------------------------------------------------

def _segundas_diferencias(n, dx):
    D = np.zeros((n - 1, n + 1))
    filas = np.arange(n - 1)
    D[filas, filas] = 1.0
    D[filas, filas + 1] = -2.0
    D[filas, filas + 2] = 1.0
    return D / dx**2


def lichnerowicz(u):
    """𝔇*𝔇 en el sector radial, ensamblado de ∫ h² (v'')² dx."""
    if u.n < N_MINIMO:
        raise ResolucionError(f"N={u.n} es demasiado pequeño para un operador de cuarto orden")
    D = _segundas_diferencias(u.n, u.dx)
    pesos_d = u.dx * u.h[1:-1] ** 2
    Q = D.T @ (pesos_d[:, None] * D)
    Q = 0.5 * (Q + Q.T)
    return LinearOperatorOnFunctions(Q, u.pesos, u.malla, np.sqrt(pesos_d))


def diferencia_medidas(u, mu):
    """Densidad respecto de dx de μ - ω_u en la coordenada de momento de u."""
    return densidad_en_momento_de(u, mu) - 1.0


def solve_linearized(u, nu, tol=TOL_COMPATIBILIDAD, operador=None):
    """Resuelve 𝔇*𝔇 v ω_u = ν con v ortogonal al núcleo."""
    operador = operador or lichnerowicz(u)
    b = u.pesos * np.asarray(nu, dtype=float)
    K = operador.nucleo()
    emparejamientos = K.T @ b
    peor = int(np.argmax(np.abs(emparejamientos)))
    if abs(emparejamientos[peor]) > tol:
        raise CompatibilidadError(
            "ν no anula el núcleo del operador linealizado", emparejamiento=float(emparejamientos[peor])
        )
    b = b - K @ np.linalg.solve(K.T @ K, emparejamientos)
    n = b.size
    bordeada = np.zeros((n + 2, n + 2))
    bordeada[:n, :n] = operador.matriz
    bordeada[:n, n:] = K
    bordeada[n:, :n] = K.T
    solucion = solve(bordeada, np.concatenate([b, np.zeros(2)]), assume_a="sym")
    v = solucion[:n]
    residuo = float(np.max(np.abs(operador.matriz @ v - b)))
    logger.info("Ecuación linealizada: residuo %.3e, emparejamientos %s", residuo, emparejamientos)
    return SolucionLinealizada(v, residuo, tuple(float(p) for p in emparejamientos))


def _gradiente_perturbado(u, mu, s):
    """Gradiente débil de 𝓜 + s·𝓕_μ en u como vector sobre los nodos de momento."""
    return mabuchi_gradient(u) + s * u.pesos * diferencia_medidas(u, mu)


def perturbation_order_check(u0, mu, s_list, usar_v0=True):
    """Norma dual del gradiente de 𝓜 + s𝓕_μ en u0 + s·v0 para cada s."""
    critico = float(np.sum(np.abs(mabuchi_gradient(u0))))
    if critico > TOL_CRITICO:
        raise ToleranciaError("punto crítico de 𝓜", critico, TOL_CRITICO)
    if usar_v0:
        solucion = solve_linearized(u0, -diferencia_medidas(u0, mu))
        v0 = solucion.v
    else:
        v0 = np.zeros(u0.n + 1)
    normas = []
    for s in s_list:
        us = SymplecticPotential(u0.valores - s * v0)
        normas.append(float(np.sum(np.abs(_gradiente_perturbado(us, mu, s)))))
    logger.info("Orden de la perturbación (v0=%s): %s", usar_v0, normas)
    return normas


def pendiente_loglog(s_list, normas):
    return float(np.polyfit(np.log(s_list), np.log(normas), 1)[0])


# ---------------------------------------------------------------------------
# Órbita de Möbius
# ---------------------------------------------------------------------------

def orbit_ray(u0, V, t_max, t_nodos=33):
    """Rayo geodésico de pullbacks g - 2c·t·x para t ∈ [0, t_max]."""
    tiempos = np.linspace(0.0, t_max, t_nodos)
    rebanadas = [orbit_slice(u0, t, V.escala) for t in tiempos]
    return MetricPath(np.linspace(0.0, 1.0, t_nodos), rebanadas, "geodesic", tiempos)


def emparejamiento_orbita(u, mu, V=GradientField()):
    """∫ h^V d(μ - ω_u), con h^V = c(x - 1/2) en la coordenada de u."""
    medida = mu.en_momento()
    x = moment_of(u, medida.nodos)
    return medida.integrar(V.escala * (x - 0.5))


def perfil_orbita(u0, mu, V=GradientField(), t_max=5.0, nodos=41):
    """(t, 𝓕_μ) en nodos de la órbita de Möbius en [-t_max, t_max]."""
    tiempos = np.linspace(-t_max, t_max, nodos)
    return tiempos, np.array([twisted_f_mu(orbit_slice(u0, t, V.escala), mu) for t in tiempos])


def orbit_minimize(u0, mu, V=GradientField(), t_max=5.0, nodos=41, tol_convexidad=1e-8):
    """argmin_t 𝓕_μ a lo largo de la órbita: sección áurea y pulido por brentq."""
    tiempos, perfil = perfil_orbita(u0, mu, V, t_max, nodos)
    segundas = np.diff(perfil, 2)
    escala = max(1.0, float(np.max(np.abs(perfil))))
    if np.min(segundas) < -tol_convexidad * escala:
        raise ToleranciaError("convexidad del perfil de 𝓕_μ", float(np.min(segundas)), tol_convexidad * escala)
    i = int(np.argmin(perfil))
    if i == 0 or i == nodos - 1:
        raise ConvergenciaError(f"𝓕_μ no alcanza su mínimo en [-{t_max}, {t_max}]", historial=perfil)

    def funcional(t):
        return twisted_f_mu(orbit_slice(u0, t, V.escala), mu)

    resultado = minimize_scalar(funcional, bracket=(tiempos[i - 1], tiempos[i], tiempos[i + 1]), method="golden")
    t_estrella = float(resultado.x)

    def emparejamiento(t):
        return emparejamiento_orbita(orbit_slice(u0, t, V.escala), mu, V)

    paso = tiempos[1] - tiempos[0]
    a, b = t_estrella - paso, t_estrella + paso
    if emparejamiento(a) * emparejamiento(b) < 0:
        t_estrella = float(brentq(emparejamiento, a, b, xtol=1e-14))
    logger.info("Mínimo de 𝓕_μ en la órbita: t* = %.10f (emparejamiento %.2e)", t_estrella, emparejamiento(t_estrella))
    return t_estrella


# ---------------------------------------------------------------------------
# Curvatura escalar constante con torsión
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _spline_cardinal(n):
    """Spline cúbico con datos identidad: sus evaluaciones dan la matriz de interpolación."""
    x = np.linspace(0.0, 1.0, n + 1)
    return CubicSpline(x, np.eye(n + 1), axis=0)


def _partes_torsion(u, alpha):
    """(𝓔^α, gradiente en g, hessiano en g) de 𝓔^α(u) = Σ_p a_p u(x_p)."""
    n = u.n + 1
    if alpha.masa == 0:
        return 0.0, np.zeros(n), np.zeros((n, n))
    pesos = pesos_trapecio(alpha.nodos) * alpha.densidad
    x = moment_of(u, alpha.nodos)
    valor = float(np.sum(pesos * u.kahler_en(x)))
    cardinal = _spline_cardinal(u.n)
    B = cardinal(x)
    B1 = cardinal(x, 1)
    q = 1.0 + x * (1 - x) * u.spline(x, 2)
    inversa_l2 = x * (1 - x) / q
    gradiente = -B.T @ pesos
    hessiano = B1.T @ ((pesos * inversa_l2)[:, None] * B1)
    return valor, gradiente, hessiano


def funcional_twisted_torico(u, alpha):
    """𝓜 + 𝓕_α en forma tórica: 𝓜_tor + 𝓔^α + masa(α)·∫ g dx."""
    valor, _, _ = _partes_torsion(u, alpha)
    return mabuchi_toric(u) + valor + alpha.masa * float(np.sum(u.pesos * u.valores))


def twisted_residual(u, alpha):
    """sup |S - tr_ω α - (R̄ - masa(α))| en forma débil, nodo a nodo."""
    _, gradiente, _ = _partes_torsion(u, alpha)
    vector = mabuchi_gradient(u) - gradiente - alpha.masa * u.pesos
    return float(np.max(np.abs(vector / u.pesos)))


def descenso_twisted(alpha, inicio, max_iter=100, tol=1e-6, armijo=1e-4):
    """Descenso precondicionado por el hessiano (Lichnerowicz + torsión) con búsqueda lineal.

    Devuelve el límite y la traza (iter, value, grad_norm, residual). Si la
    búsqueda lineal se agota, el iterado solo se acepta con residuo bajo
    RESIDUO_TWISTED.
    """
    u = inicio
    traza = []
    restricciones = 1 if alpha.masa > 0 else 2
    for iteracion in range(max_iter + 1):
        valor_t, grad_t, hess_t = _partes_torsion(u, alpha)
        valor = mabuchi_toric(u) + valor_t + alpha.masa * float(np.sum(u.pesos * u.valores))
        gradiente = -mabuchi_gradient(u) + grad_t + alpha.masa * u.pesos
        residuo = float(np.max(np.abs(gradiente / u.pesos)))
        traza.append({"iter": iteracion, "value": valor, "grad_norm": float(np.max(np.abs(gradiente))), "residual": residuo})
        logger.debug("Descenso %d: valor %.12f, residuo %.3e", iteracion, valor, residuo)
        if residuo < tol:
            return u, pd.DataFrame(traza)
        if iteracion == max_iter:
            break

        H = lichnerowicz(u).matriz + hess_t
        K = np.column_stack([u.pesos, u.pesos * (u.malla - 0.5)])[:, :restricciones]
        n = u.n + 1
        bordeada = np.zeros((n + restricciones, n + restricciones))
        bordeada[:n, :n] = H
        bordeada[:n, n:] = K
        bordeada[n:, :n] = K.T
        direccion = solve(bordeada, np.concatenate([-gradiente, np.zeros(restricciones)]), assume_a="sym")[:n]
        pendiente = float(gradiente @ direccion)

        paso = 1.0
        aceptado = False
        while paso > 1e-10:
            try:
                candidato = SymplecticPotential(u.valores + paso * direccion)
            except ConvexidadError:
                paso /= 2
                continue
            if funcional_twisted_torico(candidato, alpha) <= valor + armijo * paso * pendiente:
                aceptado = True
                break
            paso /= 2
        if not aceptado:
            if residuo < RESIDUO_TWISTED:
                logger.warning("Búsqueda lineal agotada con residuo %.3e; se acepta el límite", residuo)
                return u, pd.DataFrame(traza)
            raise ConvergenciaError("La búsqueda lineal no encontró descenso", historial=[f["residual"] for f in traza])
        u = candidato
    raise ConvergenciaError(
        f"El descenso no convergió en {max_iter} iteraciones", historial=[f["residual"] for f in traza]
    )


def twisted_csc_solve(alpha, starts, max_iter=100, tol=1e-6):
    """Límite del descenso sobre 𝓜 + 𝓕_α desde cada potencial inicial."""
    limites = []
    for indice, inicio in enumerate(starts):
        limite, traza = descenso_twisted(alpha, inicio, max_iter, tol)
        logger.info("Inicio %d: %d iteraciones, residuo final %.3e", indice, len(traza) - 1, traza["residual"].iloc[-1])
        limites.append(limite)
    return limites


def parte_no_afin(u):
    """g menos su ajuste afín por mínimos cuadrados (módulo la órbita de Möbius y constantes)."""
    x = u.malla
    coeficientes = np.polyfit(x, u.valores, 1)
    return u.valores - np.polyval(coeficientes, x)
