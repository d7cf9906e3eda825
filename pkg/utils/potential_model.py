"""
Modelo de potenciales S¹-invariantes en la esfera de Riemann.

Una métrica invariante se guarda de dos formas equivalentes:

- simpléctica: L(x) = x log x + (1-x) log(1-x) + g(x) en la malla uniforme
  de momento x ∈ [0, 1] con N+1 nodos (se guardan los valores de g);
- radial: φ(s) con s = log|z|² en la malla uniforme de [-S, S].

El potencial de Kähler es u = φ - log(1 + e^s). Fubini-Study es g ≡ 0.
Toda derivada en la malla de momento se toma por diferencias finitas de
segundo orden (también en los bordes); las evaluaciones fuera de la malla
usan el spline cúbico de g.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline
from scipy.special import expit, log_expit, logit, xlogy

from utils.errores import ConvexidadError, MallaIncompatibleError, ResolucionError

logger = logging.getLogger(__name__)

# Curvatura escalar media de la esfera con volumen 1
R_BARRA = 2.0
N_DEFECTO = 1024
VENTANA_DEFECTO = 40.0
N_MINIMO = 16
TOL_CONVEXIDAD = 1e-12
TOL_BORDE_VENTANA = 1e-6

COORD_MOMENTO = "moment"
COORD_S = "s-axis"


# ---------------------------------------------------------------------------
# Utilidades de malla
# ---------------------------------------------------------------------------

def malla_momento(n):
    return np.linspace(0.0, 1.0, n + 1)


def malla_radial(ventana, nodos):
    return np.linspace(-ventana, ventana, nodos)


def pesos_trapecio(nodos):
    """Pesos de la regla del trapecio en nodos (posiblemente no uniformes)."""
    nodos = np.asarray(nodos, dtype=float)
    dx = np.diff(nodos)
    pesos = np.zeros_like(nodos)
    pesos[:-1] += dx / 2
    pesos[1:] += dx / 2
    return pesos


def primera_diferencia(valores, h):
    return np.gradient(valores, h, edge_order=2)


def segunda_diferencia(valores, h):
    """Segunda derivada: centrada en el interior, unilateral de segundo orden en los bordes."""
    f = np.asarray(valores, dtype=float)
    if f.size < 4:
        raise ResolucionError("Se necesitan al menos 4 nodos para la segunda diferencia")
    d2 = np.empty_like(f)
    d2[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    d2[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
    d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return d2


def potencial_simplectico_fs(x):
    """x log x + (1-x) log(1-x), con 0·log 0 = 0."""
    return xlogy(x, x) + xlogy(1 - x, 1 - x)


def phi_fs(s):
    return np.logaddexp(0.0, s)


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymplecticPotential:
    """Potencial simpléctico L = L_FS + g, guardado por los valores de g."""

    valores: np.ndarray

    def __post_init__(self):
        valores = np.array(self.valores, dtype=float)
        object.__setattr__(self, "valores", valores)
        if valores.ndim != 1 or valores.size < 5:
            raise ResolucionError(f"Malla de momento demasiado corta: {valores.size} nodos")
        if not np.all(np.isfinite(valores)):
            raise ConvexidadError("g tiene valores no finitos", nodo=int(np.argmin(np.isfinite(valores))))
        # L'' = q / (x(1-x)) debe ser positivo en cada nodo
        q = self.factor_hessiano
        malos = np.flatnonzero(q <= TOL_CONVEXIDAD)
        if malos.size:
            raise ConvexidadError("L no es estrictamente convexo", nodo=int(malos[0]))

    @classmethod
    def desde_funcion(cls, funcion, n=N_DEFECTO):
        return cls(funcion(malla_momento(n)))

    @property
    def n(self):
        return self.valores.size - 1

    @cached_property
    def malla(self):
        return malla_momento(self.n)

    @property
    def dx(self):
        return 1.0 / self.n

    @cached_property
    def pesos(self):
        return pesos_trapecio(self.malla)

    @cached_property
    def derivada(self):
        return primera_diferencia(self.valores, self.dx)

    @cached_property
    def segunda(self):
        return segunda_diferencia(self.valores, self.dx)

    @cached_property
    def factor_hessiano(self):
        """q = x(1-x)·L'' = 1 + x(1-x)·g''."""
        x = self.malla
        return 1.0 + x * (1 - x) * self.segunda

    @cached_property
    def h(self):
        """h = 1/L'' = x(1-x)/q; se anula en los polos."""
        x = self.malla
        return x * (1 - x) / self.factor_hessiano

    @cached_property
    def spline(self):
        return CubicSpline(self.malla, self.valores)

    @cached_property
    def log_denominador(self):
        """log(1 - x + x·e^{g'})."""
        x = self.malla
        with np.errstate(divide="ignore"):
            return np.logaddexp(np.log1p(-x), np.log(x) + self.derivada)

    @cached_property
    def momento_fs(self):
        """Coordenada de momento y de ω_0 como función de la coordenada x de ω_u."""
        x = self.malla
        with np.errstate(divide="ignore"):
            y = np.exp(np.log(x) + self.derivada - self.log_denominador)
        y[0], y[-1] = 0.0, 1.0
        return y

    @cached_property
    def log_jacobiano(self):
        """log dy/dx = g' + log q - 2 log(1 - x + x e^{g'})."""
        return self.derivada + np.log(self.factor_hessiano) - 2 * self.log_denominador

    @cached_property
    def kahler(self):
        """Potencial de Kähler u en los nodos de momento."""
        x = self.malla
        return x * self.derivada - self.valores - self.log_denominador

    @cached_property
    def coordenada_s(self):
        """s = L'(x) en los nodos (±inf en los polos)."""
        x = self.malla
        with np.errstate(divide="ignore"):
            return logit(x) + self.derivada

    def misma_malla(self, otro):
        return self.n == otro.n

    def exigir_misma_malla(self, otro):
        if not self.misma_malla(otro):
            raise MallaIncompatibleError(f"Mallas de momento distintas: N={self.n} y N={otro.n}")

    def evaluar(self, x, derivada=0):
        return self.spline(x, derivada)

    def kahler_en(self, x):
        """u en puntos arbitrarios de [0, 1] usando el spline de g."""
        x = np.asarray(x, dtype=float)
        g = self.spline(x)
        g1 = self.spline(x, 1)
        with np.errstate(divide="ignore"):
            log_d = np.logaddexp(np.log1p(-x), np.log(x) + g1)
        return x * g1 - g - log_d


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """φ(s) muestreado en una malla uniforme de [-S, S]."""

    s_grid: np.ndarray
    valores: np.ndarray
    limites_pendiente: tuple = (0.0, 1.0)
    momentos: np.ndarray | None = None
    curvatura: np.ndarray | None = None

    def __post_init__(self):
        s = np.array(self.s_grid, dtype=float)
        phi = np.array(self.valores, dtype=float)
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "valores", phi)
        if s.shape != phi.shape or s.size < 5:
            raise ResolucionError("Malla radial inválida")
        ds = np.diff(s)
        if not np.allclose(ds, ds[0], rtol=1e-9, atol=0):
            raise MallaIncompatibleError("La malla radial debe ser uniforme")
        segundas = phi[2:] - 2 * phi[1:-1] + phi[:-2]
        malos = np.flatnonzero(segundas < -TOL_CONVEXIDAD)
        if malos.size:
            raise ConvexidadError("φ no es convexa", nodo=int(malos[0]) + 1)
        pendientes = np.diff(phi) / ds
        a, b = self.limites_pendiente
        malos = np.flatnonzero((pendientes < a - TOL_CONVEXIDAD) | (pendientes > b + TOL_CONVEXIDAD))
        if malos.size:
            raise ConvexidadError("Pendientes de φ fuera de (0, 1)", nodo=int(malos[0]))

    @property
    def ds(self):
        return self.s_grid[1] - self.s_grid[0]

    @property
    def ventana(self):
        return float(self.s_grid[-1])

    @cached_property
    def spline(self):
        return CubicSpline(self.s_grid, self.valores)

    @property
    def kahler(self):
        return self.valores - phi_fs(self.s_grid)


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Medida positiva con densidad muestreada en el intervalo de momento o en el eje s."""

    coordenada: str
    nodos: np.ndarray
    densidad: np.ndarray
    masa: float | None = None

    def __post_init__(self):
        if self.coordenada not in (COORD_MOMENTO, COORD_S):
            raise ValueError(f"Coordenada desconocida: {self.coordenada}")
        nodos = np.array(self.nodos, dtype=float)
        densidad = np.array(self.densidad, dtype=float)
        if nodos.shape != densidad.shape or np.any(np.diff(nodos) <= 0):
            raise MallaIncompatibleError("Nodos de la medida inválidos")
        if np.any(densidad < -1e-12) or not np.all(np.isfinite(densidad)):
            raise ValueError("La densidad debe ser finita y no negativa")
        densidad = np.clip(densidad, 0.0, None)
        object.__setattr__(self, "nodos", nodos)
        object.__setattr__(self, "densidad", densidad)
        masa = float(trapezoid(densidad, nodos))
        if self.masa is not None and abs(self.masa - masa) > 1e-8:
            raise ValueError(f"Masa declarada {self.masa} distinta de la integrada {masa}")
        object.__setattr__(self, "masa", masa)

    def integrar(self, valores):
        return float(trapezoid(np.asarray(valores) * self.densidad, self.nodos))

    def normalizada(self):
        return GridMeasure(self.coordenada, self.nodos, self.densidad / self.masa)

    def en_momento(self):
        """La misma medida escrita en la coordenada de momento de Fubini-Study."""
        if self.coordenada == COORD_MOMENTO:
            return self
        # cerca de los polos expit satura en 0 o 1; se descartan nodos repetidos
        y, indices = np.unique(expit(self.nodos), return_index=True)
        s = self.nodos[indices]
        jac = expit(s) * expit(-s)
        return GridMeasure(COORD_MOMENTO, y, self.densidad[indices] / jac)


@dataclass(frozen=True, eq=False)
class TwistForm:
    """(1,1)-forma semipositiva invariante, densidad en la coordenada y de ω_0."""

    nodos: np.ndarray
    densidad: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodos", np.array(self.nodos, dtype=float))
        object.__setattr__(self, "densidad", np.array(self.densidad, dtype=float))
        if np.any(self.densidad < 0):
            raise ValueError("La forma de torsión debe ser semipositiva")

    @classmethod
    def multiplo_fs(cls, c, n=N_DEFECTO):
        y = malla_momento(n)
        return cls(y, np.full_like(y, float(c)))

    @property
    def masa(self):
        return float(trapezoid(self.densidad, self.nodos))

    def como_medida(self):
        return GridMeasure(COORD_MOMENTO, self.nodos, self.densidad)

    def densidad_en(self, y):
        return np.interp(y, self.nodos, self.densidad)


# ---------------------------------------------------------------------------
# Punto dual y transformadas de Legendre
# ---------------------------------------------------------------------------

def fubini_study(n=N_DEFECTO):
    return SymplecticPotential(np.zeros(n + 1))


def perturb(u, v, t):
    """Realización simpléctica de u + t·v: g - t·v."""
    return SymplecticPotential(u.valores - t * np.asarray(v, dtype=float))


def _punto_dual(L, s, pasos_biseccion=14, pasos_newton=8):
    """Resuelve L'(x) = s para cada s; devuelve z = logit(x)."""
    s = np.asarray(s, dtype=float)
    z = np.where(s < 0, -np.inf, np.inf)
    finitos = np.isfinite(s)
    sf = s[finitos]
    d1 = L.spline.derivative()
    d2 = L.spline.derivative(2)
    muestra = d1(np.linspace(0.0, 1.0, 4 * L.n + 1))
    bajo = sf - muestra.max() - 1e-9
    alto = sf - muestra.min() + 1e-9
    # F(z) = z + g'(expit(z)) - s es creciente
    for _ in range(pasos_biseccion):
        medio = 0.5 * (bajo + alto)
        valor = medio + d1(expit(medio)) - sf
        alto = np.where(valor > 0, medio, alto)
        bajo = np.where(valor > 0, bajo, medio)
    zf = 0.5 * (bajo + alto)
    for _ in range(pasos_newton):
        x = expit(zf)
        valor = zf + d1(x) - sf
        pendiente = np.maximum(1.0 + d2(x) * x * (1 - x), 1e-12)
        zf = np.clip(zf - valor / pendiente, bajo, alto)
    logger.debug("Punto dual: residuo máximo %.3e", np.max(np.abs(zf + d1(expit(zf)) - sf), initial=0.0))
    z[finitos] = zf
    return z


def potential_at(u, s):
    """Potencial de Kähler u(s) = φ_u(s) - φ_FS(s) en puntos del eje s."""
    s = np.asarray(s, dtype=float)
    z = _punto_dual(u, s)
    x = expit(z)
    resultado = np.empty_like(s)
    finitos = np.isfinite(s)
    zf, xf, sf = z[finitos], x[finitos], s[finitos]
    L = xf * log_expit(zf) + (1 - xf) * log_expit(-zf) + u.spline(xf)
    resultado[finitos] = xf * sf - L - phi_fs(sf)
    resultado[s == -np.inf] = -u.valores[0]
    resultado[s == np.inf] = -u.valores[-1]
    return resultado


def moment_of(u, y):
    """Coordenada x de ω_u del punto cuya coordenada de Fubini-Study es y."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        s = logit(y)
    return expit(_punto_dual(u, s))


def inverse_legendre(L, ventana=VENTANA_DEFECTO, nodos=None):
    """φ(s) = sup_x (x s - L(x)) muestreado en [-S, S] con 4N+1 nodos por defecto."""
    nodos = nodos or 4 * L.n + 1
    s = malla_radial(ventana, nodos)
    z = _punto_dual(L, s)
    x = expit(z)
    L_dual = x * log_expit(z) + (1 - x) * log_expit(-z) + L.spline(x)
    phi = x * s - L_dual
    if x[0] > TOL_BORDE_VENTANA or 1 - x[-1] > TOL_BORDE_VENTANA:
        raise ResolucionError(
            f"Ventana S={ventana} demasiado pequeña: pendientes en los bordes {x[0]:.2e}, {x[-1]:.2e}"
        )
    q = 1.0 + x * (1 - x) * L.spline(x, 2)
    curvatura = x * (1 - x) / q
    return RadialPotential(s, phi, momentos=x, curvatura=curvatura)


def legendre(p, n=N_DEFECTO):
    """L(x) = sup_s (x s - φ(s)) en la malla de momento de N+1 nodos."""
    spl = p.spline
    d1 = spl.derivative()
    x = malla_momento(n)
    xi = x[1:-1]
    a, b = p.s_grid[0], p.s_grid[-1]
    if d1(a) >= xi[0] or d1(b) <= xi[-1]:
        raise ResolucionError(
            f"Ventana S={p.ventana} no resuelve las pendientes extremas de la malla N={n}"
        )
    bajo = np.full_like(xi, a)
    alto = np.full_like(xi, b)
    for _ in range(64):
        medio = 0.5 * (bajo + alto)
        mayor = d1(medio) > xi
        alto = np.where(mayor, medio, alto)
        bajo = np.where(mayor, bajo, medio)
    s = 0.5 * (bajo + alto)
    L = np.empty_like(x)
    L[1:-1] = xi * s - spl(s)
    L[0] = -p.valores[0]
    L[-1] = b - p.valores[-1]
    return SymplecticPotential(L - potencial_simplectico_fs(x))


def moment_measure(p):
    """Medida de Monge-Ampère φ''(s) ds en el eje s."""
    densidad = np.clip(segunda_diferencia(p.valores, p.ds), 0.0, None)
    return GridMeasure(COORD_S, p.s_grid, densidad)


def scalar_curvature(L):
    """S(x) = -(1/L'')'' en los nodos de momento."""
    if L.n < N_MINIMO:
        raise ResolucionError(f"N={L.n} es demasiado pequeño para la curvatura escalar (mínimo {N_MINIMO})")
    S = -segunda_diferencia(L.h, L.dx)
    saltos = np.diff(S)
    alternancia = np.mean(saltos[1:] * saltos[:-1] < 0)
    amplitud = np.max(np.abs(saltos))
    if alternancia > 0.5 and amplitud > 1e-3 * (1 + np.max(np.abs(S))):
        raise ResolucionError(
            f"Curvatura escalar oscilante (alternancia {alternancia:.2f}, amplitud {amplitud:.2e}); "
            "la malla no resuelve g"
        )
    return S


@lru_cache(maxsize=8)
def ricci_reference(ventana=VENTANA_DEFECTO, nodos=4 * N_DEFECTO + 1):
    """Ric(ω_0) = 2·ω_0 en el eje s."""
    s = malla_radial(ventana, nodos)
    return GridMeasure(COORD_S, s, 2 * expit(s) * expit(-s))


def volumen_en_fs(u):
    """ω_u escrita en la coordenada y de ω_0 (densidad dx/dy)."""
    return GridMeasure(COORD_MOMENTO, u.momento_fs, np.exp(-u.log_jacobiano))


def densidad_en_momento_de(u, medida):
    """Densidad respecto de dx (coordenada de ω_u) de una medida dada en y."""
    medida = medida.en_momento()
    y = u.momento_fs
    return np.interp(y, medida.nodos, medida.densidad) * np.exp(u.log_jacobiano)
