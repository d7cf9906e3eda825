import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas
from utils.corpus import medida_coseno
from utils.fields import pendiente_loglog, perturbation_order_check
from utils.potential_model import fubini_study

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="perturbation",
    descripcion="Orden de la perturbación de 𝓜 + s·𝓕_μ alrededor de Fubini-Study con y sin la corrección v0.",
    columnas="perturbation.csv: s, norm_v0, norm_control",
    defectos={"grid": {"n": 256}},
)

PASOS = tuple(np.geomspace(1e-3, 1e-1, 5))


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    u0 = fubini_study(malla.n)
    mu = medida_coseno(malla.n)

    con_v0 = perturbation_order_check(u0, mu, PASOS, usar_v0=True)
    control = perturbation_order_check(u0, mu, PASOS, usar_v0=False)
    pendiente = pendiente_loglog(PASOS, con_v0)
    pendiente_control = pendiente_loglog(PASOS, control)

    bitacora.minimo("pendiente_con_v0", pendiente, cfg.tol("pendiente_v0"))
    bitacora.maximo("pendiente_control", abs(pendiente_control - 1.0), cfg.tol("pendiente_control"))
    bitacora.tabla(
        "perturbation",
        pd.DataFrame({"s": PASOS, "norm_v0": con_v0, "norm_control": control}),
        lineas("s", ["norm_v0", "norm_control"], "Norma del gradiente perturbado", "s", "norma", log_x=True, log_y=True),
    )
