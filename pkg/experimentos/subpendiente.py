import logging

import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas, pares_consecutivos
from utils.corpus import generate_corpus
from utils.functionals import mabuchi, subslope_check

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="subslope",
    descripcion="Desigualdad de subpendiente M(u1) - M(u0) ≥ -d(u0, u1)·√Calabi(u0) sobre el corpus.",
    columnas="subslope.csv: start, end, lhs, rhs, slack; mabuchi_from_fs.csv: element, mabuchi",
    defectos={"count": 21},
)


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    tol = cfg.tol("subpendiente")
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    pares = pares_consecutivos(corpus)
    filas = []

    # el último elemento es C^{1,1}: solo se usa como extremo final
    for i, (u0, u1) in enumerate(pares):
        lhs, rhs, holgura = subslope_check(u0, u1, tol, ventana=malla.ventana)
        filas.append({"start": i, "end": i + 1, "lhs": lhs, "rhs": rhs, "slack": holgura})
        bitacora.minimo(f"subpendiente_{i:02d}_{i + 1:02d}", holgura, -tol)

    bitacora.tabla(
        "subslope", pd.DataFrame(filas),
        lineas("start", ["lhs", "rhs", "slack"], "Desigualdad de subpendiente", "par", "valor"),
    )

    # Fubini-Study es de curvatura constante: minimiza la K-energía
    referencia = mabuchi(corpus[0], malla.ventana)
    valores = []
    for indice, u in enumerate(corpus[1:], start=1):
        valor = mabuchi(u, malla.ventana) - referencia
        valores.append({"element": indice, "mabuchi": valor})
        bitacora.minimo(f"minimo_csc_{indice:02d}", valor, -cfg.tol("minimo_csc"))
    bitacora.medida("mabuchi_fs", referencia)
    if valores:
        bitacora.tabla(
            "mabuchi_from_fs", pd.DataFrame(valores),
            lineas("element", ["mabuchi"], "K-energía relativa a Fubini-Study", "elemento", "M(u) - M(FS)"),
        )
