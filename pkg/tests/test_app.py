import json

import pytest

from app import main
from utils.corpus import leer_corpus


def manifiesto(directorio, experimento):
    return json.loads((directorio / experimento / "manifest.json").read_text(encoding="utf-8"))


@pytest.mark.lento
def test_linealizada_pasa(tmp_path):
    codigo = main(["run", "linearized", "--grid-n", "32", "--count", "2", "--out", str(tmp_path)])
    assert codigo == 0
    datos = manifiesto(tmp_path, "linearized")
    assert datos["status"] == "passed"
    assert datos["config"]["grid"]["n"] == 32
    assert (tmp_path / "linearized" / "linearized.csv").exists()


@pytest.mark.lento
def test_dualidad_de_la_entropia_pasa(tmp_path):
    codigo = main(["run", "entropy-duality", "--grid-n", "64", "--count", "5", "--out", str(tmp_path)])
    assert codigo == 0
    assert len(manifiesto(tmp_path, "entropy-duality")["checks"]) == 3


@pytest.mark.lento
@pytest.mark.parametrize(
    ("experimento", "count"),
    [
        ("convexity", 3),
        ("subslope", 3),
        ("bergman-tv", 3),
        ("psh-variation", 3),
        ("mixed-positivity", 3),
        ("uniqueness-twisted", 5),
        ("fields-identities", 3),
        ("gradient-checks", 3),
        ("hmae-refinement", 3),
        ("strict-convexity", 3),
    ],
)
def test_experimento_pasa_con_los_defectos(tmp_path, experimento, count):
    codigo = main(["run", experimento, "--count", str(count), "--out", str(tmp_path)])
    datos = manifiesto(tmp_path, experimento)
    assert codigo == 0, [c for c in datos["checks"] if not c["passed"]]
    assert datos["status"] == "passed"
    assert datos["config"]["count"] == count


@pytest.mark.lento
def test_tolerancia_violada_devuelve_uno(tmp_path):
    codigo = main([
        "run", "perturbation", "--grid-n", "64", "--out", str(tmp_path),
        "--tol-override", "pendiente_v0=100",
    ])
    assert codigo == 1
    assert manifiesto(tmp_path, "perturbation")["status"] == "failed"


def test_configuracion_invalida_devuelve_dos(tmp_path):
    ruta = tmp_path / "config.json"
    ruta.write_text(json.dumps({"grid": {"n": 4}}), encoding="utf-8")
    assert main(["run", "convexity", "--config", str(ruta), "--out", str(tmp_path)]) == 2
    assert not (tmp_path / "convexity").exists()


def test_lista_k_vacia_devuelve_dos(tmp_path):
    assert main(["run", "bergman-tv", "--k", "", "--out", str(tmp_path)]) == 2


def test_tolerancia_mal_escrita_devuelve_dos(tmp_path):
    assert main(["run", "convexity", "--tol-override", "psh", "--out", str(tmp_path)]) == 2


def test_experimento_desconocido():
    with pytest.raises(SystemExit) as salida:
        main(["run", "inexistente"])
    assert salida.value.code == 2


def test_ayuda_documenta_las_columnas(capsys):
    with pytest.raises(SystemExit):
        main(["run", "--help"])
    assert "bergman_tv.csv" in capsys.readouterr().out


def test_subcomando_corpus(tmp_path):
    ruta = tmp_path / "corpus.json"
    assert main(["corpus", "--seed", "4", "--count", "3", "--grid-n", "32", "--out", str(ruta)]) == 0
    assert len(leer_corpus(ruta)) == 3
