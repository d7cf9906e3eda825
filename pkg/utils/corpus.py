"""
Corpus determinista de potenciales simplécticos para los experimentos.

El índice 0 es Fubini-Study, los intermedios son baches polinomiales
x²(1-x)²·P(x) más una parte afín, y el último es el perfil pegado C^{1,1}.
"""

import logging

import numpy as np

from utils.errores import ConvexidadError
from utils.potential_model import (
    COORD_MOMENTO,
    N_DEFECTO,
    GridMeasure,
    SymplecticPotential,
    fubini_study,
    malla_momento,
)
from utils.serializacion import guardar_json, leer_json, potencial_a_dict, potencial_desde_dict

logger = logging.getLogger(__name__)

GRADO_MAXIMO = 3
AMPLITUD_MAXIMA = 2.0
Q_MINIMO = 0.25
MAX_REDUCCIONES = 30


def perfil_pegado(x):
    """g = x²/2 para x < 1/2 y 1/8 + (x-1/2)/2 - (x-1/2)²/2 después: C^{1,1} con g'' = ±1."""
    x = np.asarray(x, dtype=float)
    d = x - 0.5
    return np.where(x < 0.5, 0.5 * x**2, 0.125 + 0.5 * d - 0.5 * d**2)


def coeficientes_bache(rng):
    """(constante, pendiente, coeficientes de P en potencias de x - 1/2, amplitud)."""
    grado = int(rng.integers(0, GRADO_MAXIMO + 1))
    coeficientes = rng.uniform(-1.0, 1.0, grado + 1)
    amplitud = rng.uniform(0.2, 1.0) * AMPLITUD_MAXIMA
    constante, pendiente = rng.uniform(-0.5, 0.5, 2)
    return constante, pendiente, coeficientes, amplitud


def evaluar_bache(x, constante, pendiente, coeficientes, amplitud):
    polinomio = np.polynomial.polynomial.polyval(x - 0.5, coeficientes)
    return constante + pendiente * x + amplitud * x**2 * (1 - x) ** 2 * polinomio


def certificar(x, constante, pendiente, coeficientes, amplitud):
    """Reduce la amplitud a la mitad hasta que q = 1 + x(1-x)g'' ≥ Q_MINIMO."""
    for _ in range(MAX_REDUCCIONES):
        try:
            u = SymplecticPotential(evaluar_bache(x, constante, pendiente, coeficientes, amplitud))
        except ConvexidadError:
            amplitud /= 2
            continue
        if np.min(u.factor_hessiano) >= Q_MINIMO:
            return u
        amplitud /= 2
    return SymplecticPotential(evaluar_bache(x, constante, pendiente, coeficientes, 0.0))


def generate_corpus(seed, count, n=N_DEFECTO):
    """Familia determinista de `count` potenciales en la malla de N+1 nodos."""
    if count < 1:
        raise ValueError(f"count debe ser al menos 1, se recibió {count}")
    rng = np.random.default_rng(seed)
    x = malla_momento(n)
    corpus = [fubini_study(n)]
    for _ in range(count - 2):
        corpus.append(certificar(x, *coeficientes_bache(rng)))
    if count >= 2:
        corpus.append(SymplecticPotential(perfil_pegado(x)))
    logger.info("Corpus generado: semilla %d, %d potenciales, N=%d", seed, count, n)
    return corpus


def guardar_corpus(corpus, ruta, seed):
    documento = {
        "seed": seed,
        "count": len(corpus),
        "potentials": [potencial_a_dict(u) for u in corpus],
    }
    return guardar_json(documento, ruta)


def leer_corpus(ruta):
    return [potencial_desde_dict(d) for d in leer_json(ruta)["potentials"]]


def medida_coseno(n, amplitud=0.5):
    """Probabilidad simétrica 1 + a·cos(2πy) en la coordenada de momento de ω_0."""
    y = malla_momento(n)
    return GridMeasure(COORD_MOMENTO, y, 1.0 + amplitud * np.cos(2 * np.pi * y))


def medida_lineal(n):
    """Probabilidad 2y, con centro de masa desplazado hacia el polo y = 1."""
    y = malla_momento(n)
    return GridMeasure(COORD_MOMENTO, y, 2.0 * y)
