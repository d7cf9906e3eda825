"""
Registro de experimentos.

Cada módulo del paquete se registra al importarse con
``registrar_experimento(__name__, nombre=..., descripcion=...)`` y define
``ejecutar(cfg, bitacora)``. ``cargar_experimentos`` importa todos los
módulos y devuelve el registro ordenado por nombre.
"""

import importlib
import pkgutil
from dataclasses import dataclass, field

REGISTRO = {}


@dataclass(frozen=True)
class Experimento:
    nombre: str
    modulo: str
    descripcion: str
    columnas: str = ""
    defectos: dict = field(default_factory=dict)

    @property
    def funcion(self):
        return importlib.import_module(self.modulo).ejecutar


def registrar_experimento(modulo, nombre, descripcion, columnas="", defectos=None):
    if nombre in REGISTRO and REGISTRO[nombre].modulo != modulo:
        raise ValueError(f"Experimento '{nombre}' registrado dos veces ({REGISTRO[nombre].modulo}, {modulo})")
    REGISTRO[nombre] = Experimento(nombre, modulo, descripcion, columnas, dict(defectos or {}))
    return REGISTRO[nombre]


def cargar_experimentos():
    for modulo in pkgutil.iter_modules(__path__):
        importlib.import_module(f"{__name__}.{modulo.name}")
    return dict(sorted(REGISTRO.items()))
