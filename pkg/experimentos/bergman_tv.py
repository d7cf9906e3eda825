import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import grupos, lineas
from utils.bergman import cota_uniforme, tabla_tv
from utils.corpus import generate_corpus

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="bergman-tv",
    descripcion="Convergencia en variación total de las medidas de Bergman b_k hacia φ''(s) ds.",
    columnas="bergman_tv.csv: element, k, tv, mass; bergman_bound.csv: element, bound",
    defectos={"k_list": (16, 32, 64, 128), "count": 6, "grid": {"n": 512}},
)

K_REFERENCIA = 64


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    k_list = sorted(cfg.k_list)
    filas, cotas = [], []

    for indice, u in enumerate(corpus):
        tabla = tabla_tv(u, k_list, malla.ventana)
        for k, tv, masa in tabla:
            filas.append({"element": indice, "k": k, "tv": tv, "mass": masa})
            # cada elemento de la base aporta masa 1/k
            bitacora.maximo(f"masa_{indice:02d}_k{k}", abs(masa - (k - 1) / k), cfg.tol("masa_bergman"))
        if len(tabla) > 1:
            diferencias = np.diff([tv for _, tv, _ in tabla])
            bitacora.maximo(f"tv_decreciente_{indice:02d}", float(np.max(diferencias)), 0.0, estricta=True)
        cotas.append({"element": indice, "bound": cota_uniforme(u, k_list, ventana=malla.ventana)})

    df = pd.DataFrame(filas)
    bitacora.tabla(
        "bergman_tv", df,
        grupos("k", "tv", "element", "Variación total de b_k frente a φ''", "k", "TV(k)", log_x=True, log_y=True),
    )
    bitacora.tabla(
        "bergman_bound", pd.DataFrame(cotas),
        lineas("element", ["bound"], "Cota uniforme de b_k en |s| ≤ 5", "elemento", "sup b_k"),
    )

    # en Fubini-Study b_k = (k-1)/k·φ'', luego TV(k) = 1/k
    if K_REFERENCIA in k_list:
        tv_fs = float(df[(df["element"] == 0) & (df["k"] == K_REFERENCIA)]["tv"].iloc[0])
        bitacora.medida("tv_fs_k64", tv_fs)
        bitacora.maximo("tv_fs_referencia", abs(tv_fs - 1 / K_REFERENCIA), cfg.tol("tv_fs"))
