import logging

import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas, pares_consecutivos
from utils.corpus import generate_corpus, medida_coseno
from utils.functionals import constante_poincare, strict_convexity_imu
from utils.geodesic import weak_geodesic

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="strict-convexity",
    descripcion="Convexidad estricta de t ↦ ∫u_t dμ a lo largo de geodésicas: f'(1) - f'(0) ≥ δ·A/C²·d².",
    columnas="strict_convexity.csv: pair, gap, bound, slack",
    defectos={"count": 21},
)


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    tol = cfg.tol("convexidad_estricta")
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    mu = medida_coseno(malla.n)
    bitacora.medida("constante_poincare", constante_poincare(mu))
    filas = []

    for i, (u0, u1) in enumerate(pares_consecutivos(corpus)):
        path = weak_geodesic(u0, u1, malla.t_nodos)
        brecha, cota = strict_convexity_imu(path, mu, tol, malla.ventana)
        filas.append({"pair": i, "gap": brecha, "bound": cota, "slack": brecha - cota})
        bitacora.minimo(f"convexidad_estricta_{i:02d}", brecha - cota, -tol)

    bitacora.tabla(
        "strict_convexity", pd.DataFrame(filas),
        lineas("pair", ["gap", "bound"], "Convexidad estricta de ∫u dμ", "par", "valor"),
    )
