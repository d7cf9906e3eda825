import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas
from utils.corpus import medida_coseno
from utils.functionals import entropy, entropy_convexity_gap, entropy_legendre_gap, entropy_lsc_gap
from utils.potential_model import COORD_MOMENTO, GridMeasure, malla_momento

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="entropy-duality",
    descripcion="Dualidad de Legendre de la entropía relativa: H(μ) ≥ ∫f dμ - log∫e^f dμ0 con igualdad en f = log dμ/dμ0.",
    columnas="entropy_duality.csv: sample, gap; entropy_convexity.csv: s, gap",
    defectos={"count": 100},
)

MODOS = 6


def funcion_aleatoria(rng, y):
    """Combinación aleatoria de modos de Fourier en [0, 1]."""
    coeficientes = rng.normal(0.0, 1.0, (2, MODOS)) / np.arange(1, MODOS + 1)
    f = rng.normal()
    for m in range(MODOS):
        f = f + coeficientes[0, m] * np.cos(2 * np.pi * (m + 1) * y) + coeficientes[1, m] * np.sin(2 * np.pi * (m + 1) * y)
    return f


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    rng = np.random.default_rng(cfg.seed)
    y = malla_momento(malla.n)
    mu0 = GridMeasure(COORD_MOMENTO, y, np.ones_like(y))
    mu = medida_coseno(malla.n)

    brechas = [entropy_legendre_gap(mu, mu0, funcion_aleatoria(rng, y)) for _ in range(cfg.count)]
    bitacora.tabla(
        "entropy_duality", pd.DataFrame({"sample": np.arange(cfg.count), "gap": brechas}),
        lineas("sample", ["gap"], "Brecha de la dualidad de Legendre", "muestra", "brecha"),
    )
    bitacora.minimo("dualidad_brecha_minima", float(np.min(brechas)), -cfg.tol("dualidad"))

    optima = entropy_legendre_gap(mu, mu0, np.log(mu.densidad / mu0.densidad))
    bitacora.maximo("dualidad_optimalidad", abs(optima), cfg.tol("optimalidad"))
    bitacora.medida("entropia", entropy(mu, mu0))

    # convexidad a lo largo de mezclas y semicontinuidad inferior
    otra = GridMeasure(COORD_MOMENTO, y, 2.0 * y)
    pasos = np.linspace(0.0, 1.0, 11)
    convexidad = [entropy_convexity_gap(mu, otra, mu0, s) for s in pasos]
    bitacora.tabla(
        "entropy_convexity", pd.DataFrame({"s": pasos, "gap": convexidad}),
        lineas("s", ["gap"], "Convexidad de la entropía a lo largo de mezclas", "s", "brecha"),
    )
    bitacora.maximo("entropia_convexa", float(np.max(convexidad)), cfg.tol("dualidad"))
    bitacora.medida("semicontinuidad_entropia", entropy_lsc_gap(mu, mu0, semilla=cfg.seed))
