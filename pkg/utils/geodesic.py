"""
Geodésicas débiles, subgeodésicas y la ecuación de Monge-Ampère homogénea.

El tiempo complejo es τ = t + iθ en la banda; Φ(t, s) = φ_t(s) es la
representación radial de la trayectoria y la plurisubarmonicidad se reduce a
la convexidad de Φ en las dos variables reales (t, s).
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from utils.errores import HessianoError, TrayectoriaInvalidaError
from utils.potential_model import (
    VENTANA_DEFECTO,
    RadialPotential,
    SymplecticPotential,
    inverse_legendre,
    legendre,
)

logger = logging.getLogger(__name__)

T_NODOS_DEFECTO = 65
TIPOS_TRAYECTORIA = ("geodesic", "subgeodesic", "generic")
TOL_PSD = 1e-10


@dataclass(frozen=True, eq=False)
class MetricPath:
    """Familia u_t de potenciales en una partición uniforme de [0, 1]."""

    t_grid: np.ndarray
    potenciales: tuple
    tipo: str
    tiempos: np.ndarray | None = None

    def __post_init__(self):
        t = np.array(self.t_grid, dtype=float)
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "potenciales", tuple(self.potenciales))
        if self.tipo not in TIPOS_TRAYECTORIA:
            raise TrayectoriaInvalidaError(f"Tipo de trayectoria desconocido: {self.tipo}")
        if t.size < 2 or t.size != len(self.potenciales):
            raise TrayectoriaInvalidaError("Se necesita un potencial por nodo y al menos 2 nodos")
        if abs(t[0]) > 1e-15 or abs(t[-1] - 1) > 1e-15 or not np.allclose(np.diff(t), t[1] - t[0]):
            raise TrayectoriaInvalidaError("t_grid debe ser una partición uniforme de [0, 1]")
        primero = self.potenciales[0]
        for u in self.potenciales[1:]:
            primero.exigir_misma_malla(u)
        if self.tipo == "geodesic" and t.size > 2:
            segundas = np.diff(self.matriz, 2, axis=0)
            escala = 1.0 + np.max(np.abs(self.matriz))
            if np.max(np.abs(segundas)) > 1e-10 * escala:
                raise TrayectoriaInvalidaError("Una geodésica debe ser afín en t en cada nodo")

    @cached_property
    def matriz(self):
        """Valores g_t(x) como matriz (t, x)."""
        return np.vstack([u.valores for u in self.potenciales])

    @property
    def dt(self):
        return self.t_grid[1] - self.t_grid[0]

    @property
    def n_t(self):
        return self.t_grid.size

    @property
    def inicio(self):
        return self.potenciales[0]

    @property
    def fin(self):
        return self.potenciales[-1]


@dataclass(frozen=True, eq=False)
class HessianField:
    """Hessiano 2×2 (t, s) de un campo escalar en nodos interiores."""

    t: np.ndarray
    s: np.ndarray
    tt: np.ndarray
    ts: np.ndarray
    ss: np.ndarray

    def determinante(self):
        return self.tt * self.ss - self.ts**2

    def autovalor_minimo(self):
        media = 0.5 * (self.tt + self.ss)
        radio = np.sqrt((0.5 * (self.tt - self.ss)) ** 2 + self.ts**2)
        return media - radio

    def emparejamiento_mixto(self, otro):
        """MD(A, B) = tr(A·adj B), lineal en A y en B."""
        return self.tt * otro.ss + self.ss * otro.tt - 2 * self.ts * otro.ts

    def recortar(self, margen):
        if margen == 0:
            return self
        corte = (slice(margen, -margen), slice(margen, -margen))
        return HessianField(
            self.t[margen:-margen], self.s[margen:-margen],
            self.tt[corte], self.ts[corte], self.ss[corte],
        )

    def a_dataframe(self, paso_s=1):
        T, S = np.meshgrid(self.t, self.s[::paso_s], indexing="ij")
        return pd.DataFrame({
            "t": T.ravel(),
            "s": S.ravel(),
            "det": self.determinante()[:, ::paso_s].ravel(),
            "min_eig": self.autovalor_minimo()[:, ::paso_s].ravel(),
        })


def hessiano_diferencias(F, t, s):
    """Diferencias centradas de segundo orden de F(t, s) en los nodos interiores."""
    if F.shape[0] < 3 or F.shape[1] < 3:
        raise TrayectoriaInvalidaError("Se necesitan al menos 3 nodos en t y en s")
    dt = t[1] - t[0]
    ds = s[1] - s[0]
    tt = (F[2:, 1:-1] - 2 * F[1:-1, 1:-1] + F[:-2, 1:-1]) / dt**2
    ss = (F[1:-1, 2:] - 2 * F[1:-1, 1:-1] + F[1:-1, :-2]) / ds**2
    ts = (F[2:, 2:] - F[2:, :-2] - F[:-2, 2:] + F[:-2, :-2]) / (4 * dt * ds)
    return HessianField(t[1:-1], s[1:-1], tt, ts, ss)


def representacion_radial(path, ventana=VENTANA_DEFECTO, nodos=None, indices=None):
    """Lista de RadialPotential de las rebanadas pedidas (todas por defecto)."""
    indices = range(path.n_t) if indices is None else indices
    return [inverse_legendre(path.potenciales[i], ventana, nodos) for i in indices]


def matriz_radial(radiales):
    return np.vstack([p.valores for p in radiales])


def hessiano_dual(path, radiales):
    """Hessiano de Φ por las fórmulas de Legendre en el punto dual.

    Φ_ss = 1/L'', Φ_ts = -ġ'/L'', Φ_tt = -g̈ + ġ'²/L'', con las derivadas en t
    tomadas por diferencias centradas a x fijo. Devuelve nodos interiores.
    """
    if path.n_t < 3:
        raise TrayectoriaInvalidaError("El hessiano dual necesita al menos 3 nodos en t")
    dt = path.dt
    s = radiales[0].s_grid
    filas_tt, filas_ts, filas_ss = [], [], []
    for i in range(1, path.n_t - 1):
        x = radiales[i].momentos[1:-1]
        anterior, actual, siguiente = path.potenciales[i - 1], path.potenciales[i], path.potenciales[i + 1]
        g_punto_prima = (siguiente.spline(x, 1) - anterior.spline(x, 1)) / (2 * dt)
        g_dos_puntos = (siguiente.spline(x) - 2 * actual.spline(x) + anterior.spline(x)) / dt**2
        phi_ss = radiales[i].curvatura[1:-1]
        filas_ss.append(phi_ss)
        filas_ts.append(-g_punto_prima * phi_ss)
        filas_tt.append(-g_dos_puntos + g_punto_prima**2 * phi_ss)
    return HessianField(
        path.t_grid[1:-1], s[1:-1],
        np.vstack(filas_tt), np.vstack(filas_ts), np.vstack(filas_ss),
    )


# ---------------------------------------------------------------------------
# Construcción de trayectorias
# ---------------------------------------------------------------------------

def weak_geodesic(u0, u1, t_nodos=T_NODOS_DEFECTO):
    """Geodésica débil: interpolación lineal de los potenciales simplécticos."""
    u0.exigir_misma_malla(u1)
    t = np.linspace(0.0, 1.0, t_nodos)
    rebanadas = [u0] + [SymplecticPotential((1 - ti) * u0.valores + ti * u1.valores) for ti in t[1:-1]] + [u1]
    return MetricPath(t, rebanadas, "geodesic")


def affine_kahler_path(u0, u1, t_nodos=T_NODOS_DEFECTO, ventana=VENTANA_DEFECTO, nodos=None):
    """Interpolación lineal de los potenciales de Kähler (no es geodésica)."""
    u0.exigir_misma_malla(u1)
    p0 = inverse_legendre(u0, ventana, nodos)
    p1 = inverse_legendre(u1, ventana, nodos)
    t = np.linspace(0.0, 1.0, t_nodos)
    rebanadas = [u0]
    for ti in t[1:-1]:
        phi = (1 - ti) * p0.valores + ti * p1.valores
        rebanadas.append(legendre(RadialPotential(p0.s_grid, phi), u0.n))
    rebanadas.append(u1)
    return MetricPath(t, rebanadas, "generic")


def subgeodesic_make(u0, u1, bulge, t_nodos=T_NODOS_DEFECTO, ventana=VENTANA_DEFECTO, nodos=None, tol_psd=TOL_PSD):
    """g_t = (1-t)g_0 + t g_1 + bulge·t(1-t)·x(1-x), con hessiano (t, s) verificado."""
    if bulge < 0:
        raise ValueError(f"bulge debe ser no negativo, se recibió {bulge}")
    if bulge == 0:
        return weak_geodesic(u0, u1, t_nodos)
    u0.exigir_misma_malla(u1)
    t = np.linspace(0.0, 1.0, t_nodos)
    x = u0.malla
    rebanadas = [u0]
    for ti in t[1:-1]:
        g = (1 - ti) * u0.valores + ti * u1.valores + bulge * ti * (1 - ti) * x * (1 - x)
        rebanadas.append(SymplecticPotential(g))
    rebanadas.append(u1)
    path = MetricPath(t, rebanadas, "subgeodesic")

    radiales = representacion_radial(path, ventana, nodos)
    hess = hessiano_diferencias(matriz_radial(radiales), t, radiales[0].s_grid)
    autovalores = hess.autovalor_minimo()
    peor = np.unravel_index(np.argmin(autovalores), autovalores.shape)
    minimo = float(autovalores[peor])
    logger.debug("Subgeodésica bulge=%.3g: autovalor mínimo %.3e", bulge, minimo)
    if minimo < -tol_psd:
        raise HessianoError(
            "El hessiano de la subgeodésica no es semidefinido positivo",
            nodo=(float(hess.t[peor[0]]), float(hess.s[peor[1]])),
            autovalor=minimo,
        )
    return path


def orbit_slice(u0, tiempo, escala=1.0):
    """Pullback de u0 por el flujo de Möbius en el tiempo dado: g - 2·c·t·x."""
    return SymplecticPotential(u0.valores - 2 * escala * tiempo * u0.malla)


# ---------------------------------------------------------------------------
# Verificaciones y distancia
# ---------------------------------------------------------------------------

def hmae_residual(path, ventana=VENTANA_DEFECTO, nodos=None):
    """max |det Hess Φ| sobre los nodos interiores (t, s)."""
    if path.n_t < 3:
        raise TrayectoriaInvalidaError("hmae_residual necesita al menos 3 nodos en t")
    radiales = representacion_radial(path, ventana, nodos)
    hess = hessiano_diferencias(matriz_radial(radiales), path.t_grid, radiales[0].s_grid)
    residuo = float(np.max(np.abs(hess.determinante())))
    logger.info("Residuo HMAE (%s, N=%d, %d nodos t): %.3e", path.tipo, path.inicio.n, path.n_t, residuo)
    return residuo


def escaneo_hmae(path, ventana=VENTANA_DEFECTO, nodos=None):
    radiales = representacion_radial(path, ventana, nodos)
    return hessiano_diferencias(matriz_radial(radiales), path.t_grid, radiales[0].s_grid)


def endpoint_velocity(path, extremo="start", ventana=VENTANA_DEFECTO, nodos=None):
    """Velocidad u̇ en un extremo, a s fijo, remuestreada en la malla de momento del extremo."""
    if extremo not in ("start", "end"):
        raise ValueError(f"Extremo desconocido: {extremo}")
    n = path.n_t
    indices = [0, 1, 2] if extremo == "start" else [n - 1, n - 2, n - 3]
    signo = 1.0 if extremo == "start" else -1.0
    dt = path.dt
    if n >= 3:
        p0, p1, p2 = representacion_radial(path, ventana, nodos, indices)
        d1 = (p1.valores - p0.valores) / dt
        d2 = (p2.valores - p0.valores) / (2 * dt)
        velocidad_s = signo * (2 * d1 - d2)
        g = path.matriz[indices]
        velocidad_polos = -signo * (2 * (g[1] - g[0]) / dt - (g[2] - g[0]) / (2 * dt))
    else:
        p0, p1 = representacion_radial(path, ventana, nodos, indices[:2])
        velocidad_s = signo * (p1.valores - p0.valores) / dt
        g = path.matriz[indices[:2]]
        velocidad_polos = -signo * (g[1] - g[0]) / dt

    u = path.potenciales[indices[0]]
    spline = CubicSpline(p0.s_grid, velocidad_s)
    velocidad = np.empty(u.n + 1)
    velocidad[1:-1] = spline(u.coordenada_s[1:-1])
    velocidad[0], velocidad[-1] = velocidad_polos[0], velocidad_polos[-1]
    return velocidad


def mabuchi_distance(u0, u1, t_nodos=T_NODOS_DEFECTO, ventana=VENTANA_DEFECTO, nodos=None):
    """d(u0, u1) = (∫ u̇_0² ω_{u0})^{1/2} a lo largo de la geodésica débil."""
    if u0.n == u1.n and np.array_equal(u0.valores, u1.valores):
        return 0.0
    path = weak_geodesic(u0, u1, t_nodos)
    velocidad = endpoint_velocity(path, "start", ventana, nodos)
    return float(np.sqrt(trapezoid(velocidad**2, u0.malla)))


def path_speed(path):
    """∫ u̇_t² ω_{u_t} en cada nodo t (en coordenadas de momento es ∫ ġ² dx)."""
    g_punto = np.gradient(path.matriz, path.dt, axis=0, edge_order=2)
    return trapezoid(g_punto**2, path.inicio.malla, axis=1)
