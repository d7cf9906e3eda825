import json

import pytest

from experimentos import cargar_experimentos
from utils.config import (
    TOLERANCIAS_DEFECTO,
    ExperimentConfig,
    GridConfig,
    cargar_config,
    parsear_lista_k,
    parsear_tolerancias,
)
from utils.errores import ConfiguracionError
from utils.potential_model import N_DEFECTO, VENTANA_DEFECTO


def escribir(tmp_path, datos):
    ruta = tmp_path / "config.json"
    ruta.write_text(json.dumps(datos), encoding="utf-8")
    return ruta


def test_valores_por_defecto():
    cfg = cargar_config("convexity")
    assert cfg.grid == GridConfig(N_DEFECTO, VENTANA_DEFECTO, 65)
    assert cfg.tolerancias == TOLERANCIAS_DEFECTO
    assert cfg.directorio.parts[-2:] == ("resultados", "convexity")


def test_precedencia_de_fuentes(tmp_path):
    ruta = escribir(tmp_path, {"grid": {"n": 512, "t_nodes": 33}, "seed": 3})
    cfg = cargar_config(
        "convexity",
        ruta=ruta,
        defectos={"grid": {"n": 256}, "count": 5},
        sobrescrituras={"grid": {"n": 128}, "tolerancias": {"convexidad": 1e-5}},
    )
    assert cfg.grid.n == 128
    assert cfg.grid.t_nodos == 33
    assert cfg.seed == 3
    assert cfg.count == 5
    assert cfg.tol("convexidad") == 1e-5
    assert cfg.tol("psh") == TOLERANCIAS_DEFECTO["psh"]


def test_claves_desconocidas_se_listan(tmp_path):
    ruta = escribir(tmp_path, {"gird": {}, "grid": {"N": 64}})
    with pytest.raises(ConfiguracionError) as error:
        cargar_config("convexity", ruta=ruta)
    campos = " ".join(error.value.campos)
    assert "gird" in campos and "grid.N" in campos


def test_lista_k_vacia_es_invalida():
    with pytest.raises(ConfiguracionError) as error:
        cargar_config("bergman-tv", sobrescrituras={"k_list": ()})
    assert any(campo.startswith("k_list") for campo in error.value.campos)


def test_errores_se_acumulan():
    cfg = ExperimentConfig("nada", grid=GridConfig(n=4, t_nodos=1), seed=-1)
    campos = cfg.errores(experimentos_validos={"convexity"})
    assert len(campos) == 4


def test_experimento_del_archivo_debe_coincidir(tmp_path):
    ruta = escribir(tmp_path, {"experiment": "subslope"})
    with pytest.raises(ConfiguracionError):
        cargar_config("convexity", ruta=ruta)


def test_archivo_ilegible(tmp_path):
    ruta = tmp_path / "roto.json"
    ruta.write_text("{", encoding="utf-8")
    with pytest.raises(ConfiguracionError):
        cargar_config("convexity", ruta=ruta)


def test_tolerancias_desde_la_linea_de_comandos():
    assert parsear_tolerancias(["psh=1e-4", "convexidad = 2e-6"]) == {"psh": 1e-4, "convexidad": 2e-6}
    with pytest.raises(ConfiguracionError):
        parsear_tolerancias(["psh"])
    with pytest.raises(ConfiguracionError):
        parsear_tolerancias(["psh=mucho"])


def test_tolerancia_desconocida_es_invalida():
    with pytest.raises(ConfiguracionError):
        cargar_config("convexity", sobrescrituras={"tolerancias": {"inventada": 1.0}})


def test_lista_k():
    assert parsear_lista_k("8, 16,32") == (8, 16, 32)
    assert parsear_lista_k("") == ()
    with pytest.raises(ConfiguracionError):
        parsear_lista_k("8,x")


def test_eco_de_la_configuracion():
    datos = cargar_config("convexity").a_dict()
    assert set(datos) == {"experiment", "grid", "k_list", "tolerances", "seed", "output_dir", "count"}
    assert set(datos["grid"]) == {"n", "window", "t_nodes"}
    assert list(datos["tolerances"]) == sorted(TOLERANCIAS_DEFECTO)


def test_defectos_de_cada_experimento_se_resuelven():
    registro = cargar_experimentos()
    for nombre, experimento in registro.items():
        cfg = cargar_config(nombre, defectos=experimento.defectos, experimentos_validos=registro)
        malla = experimento.defectos.get("grid", {})
        assert cfg.grid.n == malla.get("n", N_DEFECTO)
        assert cfg.grid.t_nodos == malla.get("t_nodes", 65)


def test_defectos_con_clave_de_malla():
    cfg = cargar_config("psh-variation", defectos={"grid": {"n": 256, "t_nodes": 17}})
    assert cfg.grid.t_nodos == 17
