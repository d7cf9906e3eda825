import logging

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import lineas
from utils.corpus import generate_corpus, medida_lineal
from utils.fields import (
    GradientField,
    emparejamiento_orbita,
    energy_ev,
    futaki,
    hamiltonian,
    hamiltonian_shift_residual,
    ibp_identity_check,
    inner_product,
    orbit_minimize,
    perfil_orbita,
)
from utils.geodesic import affine_kahler_path, orbit_slice, subgeodesic_make, weak_geodesic
from utils.potential_model import inverse_legendre

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="fields-identities",
    descripcion="Identidades de hamiltonianos, producto interno, Futaki, 𝓔_V y minimización en la órbita de Möbius.",
    columnas=(
        "fields_identities.csv: metric, shift_residual, ibp_residual, inner_product, futaki; "
        "energy_ev.csv: t, value, d1, d2; hamiltonians.csv: x, metric_NN; orbit_profile.csv: t, value"
    ),
    defectos={"count": 4},
)

METRICAS = 3
PRODUCTO_FS = 1.0 / 12.0
T_ORBITA = 3.0
NODOS_ORBITA = 41
BULTO = 0.5


def funciones_prueba(s):
    """Par de funciones radiales de decaimiento gaussiano para la integración por partes."""
    return np.exp(-s**2 / 2), np.exp(-((s - 0.5) ** 2) / 2)


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    V = GradientField()
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    # el perfil C^{1,1} tiene curvatura escalar singular: se usan los elementos suaves
    metricas = corpus[:-1][:METRICAS] if len(corpus) > 1 else corpus

    filas, hamiltonianos = [], {}
    for indice, u in enumerate(metricas):
        desplazamiento = hamiltonian_shift_residual(V, u, malla.ventana)
        s = inverse_legendre(u, malla.ventana).s_grid
        f, g = funciones_prueba(s)
        ibp = ibp_identity_check(f, g, u, malla.ventana)
        producto = inner_product(V, V, u, malla.ventana)
        invariante = futaki(V, u, malla.ventana)
        bitacora.maximo(f"hamiltoniano_desplazado_{indice:02d}", desplazamiento, cfg.tol("lema_hamiltoniano"))
        bitacora.maximo(f"integracion_por_partes_{indice:02d}", ibp, cfg.tol("lema_ibp"))
        bitacora.maximo(f"futaki_{indice:02d}", abs(invariante), cfg.tol("futaki"))
        filas.append({
            "metric": indice,
            "shift_residual": desplazamiento,
            "ibp_residual": ibp,
            "inner_product": producto,
            "futaki": invariante,
        })
        hamiltonianos[f"metric_{indice:02d}"] = hamiltonian(V, u, malla.ventana)

    tabla = pd.DataFrame(filas)
    bitacora.tabla(
        "fields_identities", tabla,
        lineas("metric", ["inner_product", "futaki"], "Producto interno y Futaki por métrica", "métrica", "valor"),
    )
    bitacora.tabla(
        "hamiltonians", pd.DataFrame({"x": metricas[0].malla, **hamiltonianos}),
        lineas("x", list(hamiltonianos), "Hamiltoniano de z∂/∂z", "x", "h^V"),
    )
    bitacora.maximo("producto_interno_fs", abs(tabla["inner_product"].iloc[0] - PRODUCTO_FS), cfg.tol("norma_campo"))
    bitacora.maximo("dispersion_producto_interno", float(np.ptp(tabla["inner_product"])), cfg.tol("dispersion"))
    bitacora.maximo("dispersion_futaki", float(np.ptp(tabla["futaki"])), cfg.tol("dispersion"))

    # 𝓔_V es afín a lo largo de geodésicas y su incremento no depende del camino
    if len(metricas) > 1:
        u0, u1 = metricas[0], metricas[1]
        path = weak_geodesic(u0, u1, malla.t_nodos)
        reporte = energy_ev(path, V, malla.ventana)
        bitacora.tabla(
            "energy_ev", reporte.a_dataframe(),
            lineas("t", ["value"], "𝓔_V a lo largo de una geodésica", "t", "𝓔_V"),
        )
        bitacora.maximo("linealidad_energia_v", float(np.max(np.abs(reporte.segundas))), cfg.tol("linealidad"))
        incremento = reporte.valores[-1] - reporte.valores[0]
        otros = {
            "affine": affine_kahler_path(u0, u1, malla.t_nodos, malla.ventana),
            "subgeodesic": subgeodesic_make(u0, u1, BULTO, malla.t_nodos, malla.ventana),
        }
        for tipo, otro in otros.items():
            otro_reporte = energy_ev(otro, V, malla.ventana)
            diferencia = abs(otro_reporte.valores[-1] - otro_reporte.valores[0] - incremento)
            bitacora.maximo(f"independencia_camino_{tipo}", diferencia, cfg.tol("independencia_camino"))

    # 𝓕_μ es convexa y propia a lo largo de la órbita; su mínimo anula el emparejamiento
    mu = medida_lineal(malla.n)
    u0 = metricas[0]
    tiempos, perfil = perfil_orbita(u0, mu, V, T_ORBITA, NODOS_ORBITA)
    bitacora.tabla(
        "orbit_profile", pd.DataFrame({"t": tiempos, "value": perfil}),
        lineas("t", ["value"], "𝓕_μ a lo largo de la órbita de Möbius", "t", "𝓕_μ"),
    )
    bitacora.afirmar("orbita_decrece_hacia_el_interior", perfil[1] < perfil[0], perfil[1] - perfil[0])
    bitacora.afirmar("orbita_crece_hacia_el_borde", perfil[-1] > perfil[-2], perfil[-1] - perfil[-2])
    t_estrella = orbit_minimize(u0, mu, V, T_ORBITA, NODOS_ORBITA)
    bitacora.medida("minimo_orbita", t_estrella)
    bitacora.afirmar("minimo_interior", abs(t_estrella) < T_ORBITA, t_estrella)
    bitacora.maximo(
        "emparejamiento_en_minimo",
        abs(emparejamiento_orbita(orbit_slice(u0, t_estrella, V.escala), mu, V)),
        cfg.tol("orbita"),
    )
