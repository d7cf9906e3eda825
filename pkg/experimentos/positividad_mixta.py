import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import grupos, pares_consecutivos
from utils.bergman import (
    assemble,
    barrido_truncamiento,
    decomposition_inequality,
    mixed_positivity,
    nodos_truncados,
)
from utils.corpus import generate_corpus
from utils.functionals import second_variation_check
from utils.geodesic import weak_geodesic

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="mixed-positivity",
    descripcion="Desigualdad de descomposición y positividad del emparejamiento mixto con el truncamiento Ψ_A.",
    columnas="mixed_positivity.csv: path, k, A, truncated_nodes, md, decomposition",
    defectos={"k_list": (16,), "count": 4, "grid": {"n": 256, "t_nodes": 17}},
)

A_TRUNCADO = 5.0
FRACCIONES = (0.75, 0.5, 0.25)


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    filas = []

    for i, (u0, u1) in enumerate(pares_consecutivos(corpus)):
        path = weak_geodesic(u0, u1, malla.t_nodos)
        for k in cfg.k_list:
            sistema = assemble(path, k, malla.ventana)
            nombre = f"{i:02d}_k{k}"
            descomposicion = decomposition_inequality(sistema, path)
            bitacora.minimo(f"descomposicion_{nombre}", descomposicion, -cfg.tol("descomposicion"))

            # A tomados del margen χ - log b_k: truncan 75 %, 50 % y 25 % de los nodos
            cuantiles = barrido_truncamiento(sistema, FRACCIONES)
            barrido = [(f"q{int(100 * f)}", A) for f, A in zip(FRACCIONES, cuantiles)]
            barrido += [("A5", A_TRUNCADO), ("Ainf", np.inf)]
            resultados = {}
            for etiqueta, A in barrido:
                valor = mixed_positivity(sistema, path, A=A)
                activos = nodos_truncados(sistema, A)
                resultados[etiqueta] = valor
                bitacora.minimo(f"mixta_{etiqueta}_{nombre}", valor, -cfg.tol("mixta"))
                if etiqueta.startswith("q"):
                    bitacora.afirmar(f"truncamiento_activo_{etiqueta}_{nombre}", activos > 0, activos)
                filas.append({
                    "path": i,
                    "k": k,
                    "A": A,
                    "truncated_nodes": activos,
                    "md": valor,
                    "decomposition": descomposicion,
                })

            estabilidad = abs(resultados["A5"] - resultados["Ainf"])
            bitacora.maximo(f"estabilidad_A_{nombre}", estabilidad, cfg.tol("estabilidad_a"))

        # segunda variación de 𝓜 frente a la integral del emparejamiento mixto
        bitacora.medida(f"segunda_variacion_{i:02d}", second_variation_check(path, malla.ventana))

    bitacora.tabla(
        "mixed_positivity", pd.DataFrame(filas),
        grupos("A", "md", "path", "Positividad mixta según el truncamiento", "A", "mínimo"),
    )
