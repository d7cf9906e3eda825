import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas
from utils.corpus import generate_corpus
from utils.errores import CompatibilidadError
from utils.fields import lichnerowicz, solve_linearized

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="linearized",
    descripcion="Resolubilidad de la ecuación linealizada 𝔇*𝔇 v = ν y rechazo de datos incompatibles.",
    columnas="linearized.csv: metric, residual, kernel_residual, self_adjoint_residual; solution_NN.csv: x, v",
    defectos={"count": 3, "grid": {"n": 128}},
)

DESPLAZAMIENTO_INCOMPATIBLE = 0.1


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    metricas = corpus[:-1] if len(corpus) > 1 else corpus
    filas = []

    for indice, u in enumerate(metricas):
        operador = lichnerowicz(u)
        x = u.malla
        # cos(2πx) es ortogonal a las constantes y a x - 1/2
        compatible = np.cos(2 * np.pi * x)
        solucion = solve_linearized(u, compatible, operador=operador)
        bitacora.maximo(f"residuo_lineal_{indice:02d}", solucion.residuo, cfg.tol("residuo_lineal"))

        try:
            solve_linearized(u, compatible + DESPLAZAMIENTO_INCOMPATIBLE, operador=operador)
            rechazado, emparejamiento = False, 0.0
        except CompatibilidadError as error:
            rechazado, emparejamiento = True, error.emparejamiento
        bitacora.afirmar(f"rechazo_incompatible_{indice:02d}", rechazado, emparejamiento)

        nucleo = operador.matriz @ operador.nucleo()
        residuo_nucleo = float(np.max(np.abs(nucleo)) / np.max(np.abs(operador.matriz)))
        filas.append({
            "metric": indice,
            "residual": solucion.residuo,
            "kernel_residual": residuo_nucleo,
            "self_adjoint_residual": operador.residuo_autoadjunto(),
        })
        bitacora.tabla(
            f"solution_{indice:02d}", pd.DataFrame({"x": x, "v": solucion.v}),
            lineas("x", ["v"], f"Solución de la ecuación linealizada (métrica {indice})", "x", "v"),
        )

    tabla = pd.DataFrame(filas)
    bitacora.tabla("linearized", tabla)
    bitacora.medida("residuo_nucleo", float(tabla["kernel_residual"].max()))
