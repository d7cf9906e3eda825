"""
Ejecución de un experimento: bitácora de comprobaciones, tablas CSV,
scripts de gráficos y manifiesto.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

import utils
from experimentos import cargar_experimentos
from utils.errores import ConfiguracionError, ToleranciaError
from utils.serializacion import escribir_csv, guardar_json

logger = logging.getLogger(__name__)

VERSION_MANIFIESTO = 1

PLANTILLA_GRAFICO = '''"""Gráfico de {csv}. Ejecutar desde la raíz del repositorio."""
import os
import sys
from pathlib import Path

import pandas as pd

sys.path.insert(0, os.getcwd())

from utils.funciones import {constructor}

carpeta = Path(__file__).resolve().parent
df = pd.read_csv(carpeta / "{csv}")
fig = {constructor}(df, {argumentos})
fig.write_html(carpeta / "{html}")
'''


@dataclass(frozen=True)
class Grafico:
    constructor: str
    argumentos: dict = field(default_factory=dict)


def lineas(x, columnas, titulo, eje_x, eje_y, log_x=False, log_y=False):
    return Grafico("generar_grafico_lineas", dict(
        x=x, columnas=list(columnas), titulo=titulo, eje_x=eje_x, eje_y=eje_y, log_x=log_x, log_y=log_y,
    ))


def grupos(x, y, grupo, titulo, eje_x, eje_y, log_x=False, log_y=False):
    return Grafico("generar_grafico_grupos", dict(
        x=x, y=y, grupo=grupo, titulo=titulo, eje_x=eje_x, eje_y=eje_y, log_x=log_x, log_y=log_y,
    ))


def mapa_calor(x, y, z, titulo, eje_x, eje_y):
    return Grafico("generar_mapa_calor", dict(x=x, y=y, z=z, titulo=titulo, eje_x=eje_x, eje_y=eje_y))


class Bitacora:
    """Comprobaciones, medidas y artefactos de una ejecución."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.directorio = cfg.directorio
        self.comprobaciones = []
        self.medidas = {}
        self.artefactos = []

    def _comprobar(self, nombre, medido, tolerancia, tipo, cumple):
        medido = float(medido)
        registro = {
            "name": nombre,
            "kind": tipo,
            "measured": medido,
            "tolerance": float(tolerancia),
            "passed": bool(cumple),
        }
        self.comprobaciones.append(registro)
        nivel = logging.INFO if cumple else logging.WARNING
        logger.log(nivel, "%s %s: medido %.6e, cota %.3e (%s)", "OK" if cumple else "FALLA", nombre, medido, tolerancia, tipo)
        return registro["passed"]

    def minimo(self, nombre, medido, cota, estricta=False):
        """Pasa si medido ≥ cota (> si es estricta)."""
        cumple = medido > cota if estricta else medido >= cota
        return self._comprobar(nombre, medido, cota, "lower", np.isfinite(medido) and cumple)

    def maximo(self, nombre, medido, cota, estricta=False):
        """Pasa si medido ≤ cota (< si es estricta)."""
        cumple = medido < cota if estricta else medido <= cota
        return self._comprobar(nombre, medido, cota, "upper", np.isfinite(medido) and cumple)

    def afirmar(self, nombre, cumple, medido=0.0):
        """Comprobación booleana (por ejemplo, que un control de mutación falle)."""
        return self._comprobar(nombre, medido, 0.0, "boolean", cumple)

    def medida(self, nombre, valor):
        self.medidas[nombre] = float(valor)
        logger.info("Medida %s = %.6e", nombre, valor)

    def tabla(self, nombre, df, grafico=None):
        ruta = escribir_csv(df, self.directorio / f"{nombre}.csv")
        self.artefactos.append(ruta.name)
        if grafico is not None:
            self.artefactos.append(self._script(nombre, grafico).name)
        return ruta

    def _script(self, nombre, grafico):
        argumentos = ", ".join(f"{clave}={valor!r}" for clave, valor in grafico.argumentos.items())
        texto = PLANTILLA_GRAFICO.format(
            csv=f"{nombre}.csv", html=f"{nombre}.html", constructor=grafico.constructor, argumentos=argumentos,
        )
        ruta = self.directorio / f"grafico_{nombre}.py"
        ruta.write_text(texto, encoding="utf-8")
        return ruta

    def fallas(self):
        return [c for c in self.comprobaciones if not c["passed"]]

    def escribir_manifiesto(self, estado):
        manifiesto = {
            "manifest_version": VERSION_MANIFIESTO,
            "version": utils.__version__,
            "experiment": self.cfg.experiment,
            "status": estado,
            "config": self.cfg.a_dict(),
            "checks": self.comprobaciones,
            "measurements": dict(sorted(self.medidas.items())),
            "artifacts": sorted(self.artefactos),
        }
        return guardar_json(manifiesto, self.directorio / "manifest.json")


def pares_consecutivos(corpus, minimo=1):
    if len(corpus) < minimo + 1:
        raise ConfiguracionError([f"count: se necesitan al menos {minimo + 1} potenciales (hay {len(corpus)})"])
    return list(zip(corpus[:-1], corpus[1:]))


def ejecutar(cfg):
    """Corre el experimento de la configuración; 0 si todas las comprobaciones pasan."""
    experimento = cargar_experimentos()[cfg.experiment]
    bitacora = Bitacora(cfg)
    bitacora.directorio.mkdir(parents=True, exist_ok=True)
    logger.info("Experimento %s en %s", cfg.experiment, bitacora.directorio)
    estado = "error"
    try:
        experimento.funcion(cfg, bitacora)
        estado = "failed" if bitacora.fallas() else "passed"
    finally:
        bitacora.escribir_manifiesto(estado)
    fallas = bitacora.fallas()
    if fallas:
        primera = fallas[0]
        raise ToleranciaError(primera["name"], primera["measured"], primera["tolerance"])
    logger.info("Experimento %s: %d comprobaciones superadas", cfg.experiment, len(bitacora.comprobaciones))
    return 0
