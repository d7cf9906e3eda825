import json

import pandas as pd
import pytest

from experimentos import REGISTRO, Experimento, cargar_experimentos, ejecucion
from utils.config import cargar_config
from utils.errores import ConfiguracionError, ToleranciaError

EXPERIMENTOS = {
    "bergman-tv",
    "convexity",
    "entropy-duality",
    "fields-identities",
    "gradient-checks",
    "hmae-refinement",
    "linearized",
    "mixed-positivity",
    "perturbation",
    "psh-variation",
    "strict-convexity",
    "subslope",
    "uniqueness-twisted",
}


def ejecutar(cfg, bitacora):
    """Experimento de prueba con una comprobación que pasa y otra que falla."""
    bitacora.minimo("pasa", 1.0, 0.0)
    bitacora.maximo("falla", 2.0, 1.0)
    bitacora.medida("valor", 3.0)
    bitacora.tabla("tabla", pd.DataFrame({"x": [0.0, 1.0]}), ejecucion.lineas("x", ["x"], "x", "x", "x"))


def test_registro_completo():
    registro = cargar_experimentos()
    assert EXPERIMENTOS <= set(registro)
    for experimento in registro.values():
        assert callable(experimento.funcion)
        assert experimento.columnas


def test_falla_escribe_el_manifiesto(tmp_path, monkeypatch):
    monkeypatch.setitem(REGISTRO, "prueba", Experimento("prueba", __name__, "experimento de prueba"))
    cfg = cargar_config("prueba", sobrescrituras={"output_dir": str(tmp_path)})
    with pytest.raises(ToleranciaError) as error:
        ejecucion.ejecutar(cfg)
    assert error.value.nombre == "falla"

    manifiesto = json.loads((tmp_path / "prueba" / "manifest.json").read_text(encoding="utf-8"))
    assert manifiesto["manifest_version"] == 1
    assert manifiesto["status"] == "failed"
    assert [c["passed"] for c in manifiesto["checks"]] == [True, False]
    assert manifiesto["measurements"] == {"valor": 3.0}
    assert manifiesto["artifacts"] == ["grafico_tabla.py", "tabla.csv"]
    assert "generar_grafico_lineas" in (tmp_path / "prueba" / "grafico_tabla.py").read_text(encoding="utf-8")


def test_pares_consecutivos():
    assert ejecucion.pares_consecutivos([1, 2, 3]) == [(1, 2), (2, 3)]
    with pytest.raises(ConfiguracionError):
        ejecucion.pares_consecutivos([1])
