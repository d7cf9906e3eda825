"""
Codificación JSON de potenciales, medidas, trayectorias y sistemas de
Bergman, y escritura determinista de tablas CSV.

Los flotantes se escriben con ``repr`` (lo que hace ``json``), de modo que la
ida y vuelta por JSON es exacta bit a bit.
"""

import json
import logging
from pathlib import Path

import numpy as np

from utils.bergman import BergmanSystem
from utils.errores import TrayectoriaInvalidaError
from utils.fields import LinearOperatorOnFunctions
from utils.geodesic import MetricPath, matriz_radial, representacion_radial
from utils.potential_model import (
    GridMeasure,
    RadialPotential,
    SymplecticPotential,
    malla_radial,
)

logger = logging.getLogger(__name__)

FORMATO_FLOTANTE = "%.12e"
REPRESENTACIONES = ("symplectic", "radial")


def _lista(valores):
    return [float(v) for v in np.asarray(valores, dtype=float).ravel()]


def _nativo(obj):
    # tipos de numpy que json no sabe escribir
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"Objeto no serializable: {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Potenciales y medidas
# ---------------------------------------------------------------------------

def potencial_a_dict(p):
    if isinstance(p, SymplecticPotential):
        return {"grid_n": p.n, "window": None, "representation": "symplectic", "values": _lista(p.valores)}
    if isinstance(p, RadialPotential):
        return {
            "grid_n": p.s_grid.size - 1,
            "window": p.ventana,
            "representation": "radial",
            "values": _lista(p.valores),
        }
    raise TypeError(f"No es un potencial: {type(p).__name__}")


def potencial_desde_dict(datos):
    representacion = datos.get("representation")
    if representacion not in REPRESENTACIONES:
        raise ValueError(f"Representación desconocida: {representacion!r}")
    valores = np.array(datos["values"], dtype=float)
    if valores.size != datos["grid_n"] + 1:
        raise ValueError(f"grid_n={datos['grid_n']} no corresponde a {valores.size} valores")
    if representacion == "symplectic":
        return SymplecticPotential(valores)
    return RadialPotential(malla_radial(datos["window"], valores.size), valores)


def medida_a_dict(mu):
    return {"coordinate": mu.coordenada, "nodes": _lista(mu.nodos), "density": _lista(mu.densidad)}


def medida_desde_dict(datos):
    return GridMeasure(datos["coordinate"], datos["nodes"], datos["density"])


# ---------------------------------------------------------------------------
# Trayectorias, sistemas y operadores
# ---------------------------------------------------------------------------

def trayectoria_a_dict(path):
    datos = {
        "t_grid": _lista(path.t_grid),
        "kind": path.tipo,
        "slices": [potencial_a_dict(u) for u in path.potenciales],
    }
    if path.tiempos is not None:
        datos["times"] = _lista(path.tiempos)
    return datos


def trayectoria_desde_dict(datos):
    rebanadas = [potencial_desde_dict(d) for d in datos["slices"]]
    tiempos = np.array(datos["times"]) if "times" in datos else None
    return MetricPath(np.array(datos["t_grid"]), rebanadas, datos["kind"], tiempos)


def sistema_a_dict(sys):
    return {
        "k": int(sys.k),
        "t_grid": _lista(sys.t_grid),
        "s_grid": _lista(sys.s_grid),
        "log_norms": np.asarray(sys.log_normas, dtype=float).tolist(),
    }


def sistema_desde_dict(datos, path):
    """El sistema guarda solo las normas; Φ y los perfiles radiales se recomponen desde la trayectoria.

    La ventana y el número de nodos salen de la malla s guardada, así que el
    sistema leído admite las mismas verificaciones que el original.
    """
    s_grid = np.array(datos["s_grid"], dtype=float)
    t_grid = np.array(datos["t_grid"], dtype=float)
    if path.n_t != t_grid.size:
        raise TrayectoriaInvalidaError("La trayectoria no corresponde al sistema guardado")
    radiales = tuple(representacion_radial(path, float(s_grid[-1]), s_grid.size))
    return BergmanSystem(
        k=int(datos["k"]),
        t_grid=t_grid,
        s_grid=s_grid,
        log_normas=np.array(datos["log_norms"], dtype=float),
        phi=matriz_radial(radiales),
        radiales=radiales,
    )


def operador_a_dict(operador):
    """Matriz densa por filas."""
    filas, columnas = operador.matriz.shape
    return {
        "rows": filas,
        "cols": columnas,
        "data": _lista(operador.matriz),
        "weights": _lista(operador.pesos),
        "grid": _lista(operador.malla),
        "sqrt_weights_d": _lista(operador.raiz_pesos_d),
    }


def operador_desde_dict(datos):
    matriz = np.array(datos["data"], dtype=float).reshape(datos["rows"], datos["cols"])
    return LinearOperatorOnFunctions(
        matriz, np.array(datos["weights"]), np.array(datos["grid"]), np.array(datos["sqrt_weights_d"])
    )


# ---------------------------------------------------------------------------
# Archivos
# ---------------------------------------------------------------------------

def a_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_nativo) + "\n"


def guardar_json(obj, ruta):
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    ruta.write_text(a_json(obj), encoding="utf-8")
    logger.debug("JSON escrito en %s", ruta)
    return ruta


def leer_json(ruta):
    return json.loads(Path(ruta).read_text(encoding="utf-8"))


def escribir_csv(df, ruta):
    """CSV con formato flotante fijo: la misma tabla da los mismos bytes."""
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(ruta, index=False, float_format=FORMATO_FLOTANTE, lineterminator="\n")
    logger.debug("CSV escrito en %s (%d filas)", ruta, len(df))
    return ruta
