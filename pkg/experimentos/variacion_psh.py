import logging

import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas, mapa_calor, pares_consecutivos
from utils.bergman import assemble, convexidad_normas, falsear_normas, psh_variation_check
from utils.corpus import generate_corpus
from utils.geodesic import hessiano_diferencias, subgeodesic_make, weak_geodesic

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="psh-variation",
    descripcion="Plurisubarmonicidad en (t, s) del logaritmo del núcleo de Bergman a lo largo de (sub)geodésicas.",
    columnas=(
        "psh_variation.csv: path, kind, k, min_eig, norm_convexity, mutated_min_eig, mutated_norm_convexity; "
        "psh_hessian.csv: t, s, det, min_eig"
    ),
    defectos={"k_list": (16, 32), "count": 4, "grid": {"n": 256, "t_nodes": 17}},
)

BULTO = 0.5
PASO_S_MAPA = 8


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    tol = cfg.tol("psh")
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    filas = []
    mapa_escrito = False

    for i, (u0, u1) in enumerate(pares_consecutivos(corpus)):
        caminos = {
            "geodesic": weak_geodesic(u0, u1, malla.t_nodos),
            "subgeodesic": subgeodesic_make(u0, u1, BULTO, malla.t_nodos, malla.ventana),
        }
        for tipo, path in caminos.items():
            for k in cfg.k_list:
                sistema = assemble(path, k, malla.ventana)
                minimo = psh_variation_check(sistema)
                normas = convexidad_normas(sistema)
                nombre = f"{tipo}_{i:02d}_k{k}"
                bitacora.minimo(f"psh_{nombre}", minimo, -tol)
                if tipo == "geodesic":
                    bitacora.minimo(f"normas_convexas_{nombre}", normas, -tol)

                # control de mutación: normas concavificadas deben romper la convexidad
                falso = falsear_normas(sistema)
                minimo_falso = psh_variation_check(falso)
                normas_falsas = convexidad_normas(falso)
                bitacora.afirmar(f"mutacion_detectada_{nombre}", minimo_falso < -tol, minimo_falso)
                filas.append({
                    "path": i,
                    "kind": tipo,
                    "k": k,
                    "min_eig": minimo,
                    "norm_convexity": normas,
                    "mutated_min_eig": minimo_falso,
                    "mutated_norm_convexity": normas_falsas,
                })

                if not mapa_escrito:
                    hess = hessiano_diferencias(sistema.matriz_log_nucleo(), sistema.t_grid, sistema.s_grid)
                    bitacora.tabla(
                        "psh_hessian", hess.a_dataframe(PASO_S_MAPA),
                        mapa_calor("t", "s", "min_eig", "Autovalor mínimo del hessiano de log K", "t", "s"),
                    )
                    mapa_escrito = True

    bitacora.tabla(
        "psh_variation", pd.DataFrame(filas),
        lineas("path", ["min_eig", "mutated_min_eig"], "Autovalor mínimo por trayectoria", "trayectoria", "autovalor"),
    )
