import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas
from utils.corpus import generate_corpus
from utils.functionals import (
    emparejamiento_energia,
    emparejamiento_energia_t,
    emparejamiento_mabuchi,
    energy_e,
    energy_et,
    mabuchi,
    orden_observado,
)
from utils.potential_model import ricci_reference

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="gradient-checks",
    descripcion="Derivadas por diferencias finitas de 𝓔, 𝓔^T y 𝓜 frente a sus diferenciales.",
    columnas="gradient_checks.csv: element, functional, order, fd_derivative, pairing, mismatch",
    defectos={"count": 4, "grid": {"n": 512}},
)


def direccion(x):
    """Dirección de prueba suave que no es afín."""
    return 0.1 * np.cos(np.pi * x) + 0.05 * np.sin(2 * np.pi * x)


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    # el perfil C^{1,1} del final no tiene curvatura escalar acotada
    elementos = corpus[:-1] if len(corpus) > 1 else corpus
    T = ricci_reference(malla.ventana, 4 * malla.n + 1)
    filas = []

    for indice, u in enumerate(elementos):
        v = direccion(u.malla)
        casos = {
            "energy": (energy_e, emparejamiento_energia(u, v)),
            "energy_t": (lambda w: energy_et(w, T), emparejamiento_energia_t(u, v, T)),
            "mabuchi": (lambda w: mabuchi(w, malla.ventana), emparejamiento_mabuchi(u, v)),
        }
        for nombre, (funcional, emparejamiento) in casos.items():
            orden, derivada = orden_observado(funcional, u, v)
            discrepancia = abs(derivada - emparejamiento)
            filas.append({
                "element": indice,
                "functional": nombre,
                "order": orden,
                "fd_derivative": derivada,
                "pairing": emparejamiento,
                "mismatch": discrepancia,
            })
            if np.isfinite(orden):
                bitacora.minimo(f"orden_{nombre}_{indice:02d}", orden, cfg.tol("orden_gradiente"))
            else:
                # diferencias en el piso de redondeo: no hay error de truncamiento que medir
                bitacora.afirmar(f"orden_{nombre}_{indice:02d}", True, derivada)
            bitacora.medida(f"discrepancia_{nombre}_{indice:02d}", discrepancia)

    bitacora.tabla(
        "gradient_checks", pd.DataFrame(filas),
        lineas("element", ["mismatch"], "Discrepancia entre diferencias finitas y diferencial", "elemento",
               "discrepancia", log_y=True),
    )
