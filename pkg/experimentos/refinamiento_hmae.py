import logging

import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import grupos, pares_consecutivos
from utils.corpus import generate_corpus
from utils.errores import ConfiguracionError
from utils.geodesic import hmae_residual, weak_geodesic
from utils.potential_model import SymplecticPotential

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="hmae-refinement",
    descripcion="Orden de convergencia del residuo de Monge-Ampère homogénea bajo refinamiento 2× en t y en s.",
    columnas="hmae_refinement.csv: pair, level, n, t_nodes, residual, ratio",
    defectos={"count": 7, "grid": {"n": 128, "t_nodes": 17}},
)

NIVELES = 3


def submalla(u, factor):
    """El mismo potencial en la malla de momento factor veces más gruesa."""
    return SymplecticPotential(u.valores[::factor])


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    if cfg.count < 3:
        raise ConfiguracionError(["count: se necesitan al menos 3 potenciales"])
    # corpus en la malla más fina; las gruesas son submuestras exactas
    factor_max = 2 ** (NIVELES - 1)
    fino = generate_corpus(cfg.seed, cfg.count, malla.n * factor_max)
    # el perfil C^{1,1} no tiene orden 2: se excluye
    pares = pares_consecutivos(fino[:-1])
    filas = []

    for i, (u0, u1) in enumerate(pares):
        residuos = []
        for nivel in range(NIVELES):
            factor = 2 ** (NIVELES - 1 - nivel)
            t_nodos = (malla.t_nodos - 1) * 2**nivel + 1
            path = weak_geodesic(submalla(u0, factor), submalla(u1, factor), t_nodos)
            residuo = hmae_residual(path, malla.ventana)
            razon = residuos[-1] / residuo if residuos and residuo > 0 else float("nan")
            residuos.append(residuo)
            filas.append({
                "pair": i,
                "level": nivel,
                "n": path.inicio.n,
                "t_nodes": t_nodos,
                "residual": residuo,
                "ratio": razon,
            })
            if nivel > 0:
                bitacora.minimo(f"razon_hmae_{i:02d}_nivel{nivel}", razon, cfg.tol("razon_hmae"))

    bitacora.tabla(
        "hmae_refinement", pd.DataFrame(filas),
        grupos("n", "residual", "pair", "Residuo HMAE bajo refinamiento", "N", "max |det Hess Φ|",
               log_x=True, log_y=True),
    )
