"""
Configuración de los experimentos.

Precedencia, de menor a mayor: valores por defecto de las dataclasses,
valores por defecto del experimento, archivo JSON (--config) y banderas de
la línea de comandos.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from utils.errores import ConfiguracionError
from utils.potential_model import N_DEFECTO, N_MINIMO, VENTANA_DEFECTO

logger = logging.getLogger(__name__)

T_NODOS_DEFECTO = 65

TOLERANCIAS_DEFECTO = {
    "convexidad": 1e-6,
    "continuidad": 1e-8,
    "subpendiente": 1e-4,
    "minimo_csc": 1e-6,
    "masa_bergman": 1e-8,
    "tv_fs": 1e-8,
    "psh": 1e-6,
    "descomposicion": 1e-6,
    "mixta": 1e-8,
    "estabilidad_a": 1e-4,
    "razon_hmae": 3.5,
    "orden_gradiente": 1.9,
    "dualidad": 1e-9,
    "optimalidad": 1e-6,
    "lema_hamiltoniano": 1e-6,
    "lema_ibp": 1e-5,
    "dispersion": 1e-5,
    "futaki": 1e-5,
    "independencia_camino": 1e-5,
    "norma_campo": 1e-6,
    "linealidad": 1e-5,
    "orbita": 1e-8,
    "residuo_lineal": 1e-8,
    "pendiente_v0": 1.9,
    "pendiente_control": 0.15,
    "unicidad": 1e-4,
    "convexidad_estricta": 1e-6,
}

CLAVES_JSON = {"experiment", "grid", "k_list", "tolerances", "seed", "output_dir", "count"}
CLAVES_MALLA = {"n", "window", "t_nodes"}


@dataclass(frozen=True)
class GridConfig:
    n: int = N_DEFECTO
    ventana: float = VENTANA_DEFECTO
    t_nodos: int = T_NODOS_DEFECTO


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: GridConfig = field(default_factory=GridConfig)
    k_list: tuple = (16, 32, 64, 128)
    tolerancias: dict = field(default_factory=lambda: dict(TOLERANCIAS_DEFECTO))
    seed: int = 0
    output_dir: str = "resultados"
    count: int = 21

    def tol(self, nombre):
        return self.tolerancias[nombre]

    @property
    def directorio(self):
        return Path(self.output_dir) / self.experiment

    def errores(self, experimentos_validos=None):
        """Lista de campos inválidos con su motivo."""
        campos = []
        if experimentos_validos is not None and self.experiment not in experimentos_validos:
            campos.append(f"experiment: '{self.experiment}' no está registrado")
        if not isinstance(self.grid.n, int) or self.grid.n < N_MINIMO:
            campos.append(f"grid.n: debe ser un entero ≥ {N_MINIMO} (se recibió {self.grid.n!r})")
        if not self.grid.ventana > 0:
            campos.append(f"grid.window: debe ser positiva (se recibió {self.grid.ventana!r})")
        if not isinstance(self.grid.t_nodos, int) or self.grid.t_nodos < 3:
            campos.append(f"grid.t_nodes: debe ser un entero ≥ 3 (se recibió {self.grid.t_nodos!r})")
        if len(self.k_list) == 0:
            campos.append("k_list: no puede estar vacía")
        elif any(not isinstance(k, int) or k < 3 for k in self.k_list):
            campos.append(f"k_list: cada k debe ser un entero ≥ 3 (se recibió {list(self.k_list)})")
        for nombre, valor in sorted(self.tolerancias.items()):
            if nombre not in TOLERANCIAS_DEFECTO:
                campos.append(f"tolerances.{nombre}: tolerancia desconocida")
            elif not isinstance(valor, (int, float)) or not valor > 0:
                campos.append(f"tolerances.{nombre}: debe ser positiva (se recibió {valor!r})")
        if not isinstance(self.seed, int) or self.seed < 0:
            campos.append(f"seed: debe ser un entero no negativo (se recibió {self.seed!r})")
        if not isinstance(self.count, int) or self.count < 1:
            campos.append(f"count: debe ser un entero ≥ 1 (se recibió {self.count!r})")
        if not self.output_dir:
            campos.append("output_dir: no puede estar vacío")
        return campos

    def validar(self, experimentos_validos=None):
        campos = self.errores(experimentos_validos)
        if campos:
            raise ConfiguracionError(campos)
        return self

    def a_dict(self):
        datos = asdict(self)
        datos["grid"] = {"n": self.grid.n, "window": self.grid.ventana, "t_nodes": self.grid.t_nodos}
        datos["k_list"] = list(self.k_list)
        datos["tolerances"] = dict(sorted(datos.pop("tolerancias").items()))
        return datos


def _desde_json(datos):
    """Convierte el documento JSON en argumentos de ExperimentConfig."""
    campos = [f"{clave}: clave desconocida" for clave in sorted(set(datos) - CLAVES_JSON)]
    malla = datos.get("grid", {})
    campos += [f"grid.{clave}: clave desconocida" for clave in sorted(set(malla) - CLAVES_MALLA)]
    if campos:
        raise ConfiguracionError(campos)
    argumentos = {}
    if malla:
        argumentos["grid"] = {
            "n": malla.get("n"),
            "ventana": malla.get("window"),
            "t_nodos": malla.get("t_nodes"),
        }
    if "k_list" in datos:
        argumentos["k_list"] = tuple(datos["k_list"])
    if "tolerances" in datos:
        argumentos["tolerancias"] = dict(datos["tolerances"])
    for clave in ("seed", "output_dir", "count", "experiment"):
        if clave in datos:
            argumentos[clave] = datos[clave]
    return argumentos


def _aplicar(cfg, argumentos):
    argumentos = dict(argumentos)
    malla = {k: v for k, v in argumentos.pop("grid", {}).items() if v is not None}
    tolerancias = argumentos.pop("tolerancias", None)
    argumentos = {k: v for k, v in argumentos.items() if v is not None}
    if malla:
        argumentos["grid"] = replace(cfg.grid, **malla)
    if tolerancias:
        argumentos["tolerancias"] = {**cfg.tolerancias, **tolerancias}
    return replace(cfg, **argumentos)


def parsear_tolerancias(pares):
    """["clave=valor", ...] -> dict; los errores de formato se acumulan."""
    tolerancias, campos = {}, []
    for par in pares or ():
        clave, separador, valor = par.partition("=")
        if not separador or not clave:
            campos.append(f"--tol-override {par!r}: se esperaba CLAVE=VALOR")
            continue
        try:
            tolerancias[clave.strip()] = float(valor)
        except ValueError:
            campos.append(f"tolerances.{clave.strip()}: {valor!r} no es un número")
    if campos:
        raise ConfiguracionError(campos)
    return tolerancias


def parsear_lista_k(texto):
    """'8,16,32' -> (8, 16, 32); la lista vacía se deja para validar()."""
    partes = [p.strip() for p in texto.split(",") if p.strip()]
    try:
        return tuple(int(p) for p in partes)
    except ValueError:
        raise ConfiguracionError([f"k_list: {texto!r} no es una lista de enteros"]) from None


def cargar_config(experimento, ruta=None, defectos=None, sobrescrituras=None, experimentos_validos=None):
    """ExperimentConfig validada a partir de las cuatro fuentes.

    Los defectos del experimento usan las mismas claves que el JSON.
    """
    cfg = ExperimentConfig(experimento)
    if defectos:
        cfg = _aplicar(cfg, _desde_json(defectos))
    if ruta is not None:
        try:
            datos = json.loads(Path(ruta).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as error:
            raise ConfiguracionError([f"config: no se pudo leer {ruta} ({error})"]) from error
        if not isinstance(datos, dict):
            raise ConfiguracionError(["config: el documento debe ser un objeto JSON"])
        argumentos = _desde_json(datos)
        if argumentos.get("experiment", experimento) != experimento:
            raise ConfiguracionError(
                [f"experiment: el archivo declara '{argumentos['experiment']}' pero se pidió '{experimento}'"]
            )
        cfg = _aplicar(cfg, argumentos)
        logger.info("Configuración leída de %s", ruta)
    if sobrescrituras:
        cfg = _aplicar(cfg, sobrescrituras)
    return cfg.validar(experimentos_validos)
