import numpy as np
import pytest

from utils.corpus import (
    Q_MINIMO,
    generate_corpus,
    guardar_corpus,
    leer_corpus,
    medida_coseno,
    medida_lineal,
    perfil_pegado,
)
from utils.potential_model import malla_momento


def test_corpus_determinista():
    a = generate_corpus(11, 6, 64)
    b = generate_corpus(11, 6, 64)
    assert all(np.array_equal(u.valores, v.valores) for u, v in zip(a, b))


def test_semillas_distintas_dan_corpus_distintos():
    a = generate_corpus(1, 4, 64)
    b = generate_corpus(2, 4, 64)
    assert not all(np.array_equal(u.valores, v.valores) for u, v in zip(a, b))


def test_estructura_del_corpus():
    corpus = generate_corpus(0, 5, 64)
    assert len(corpus) == 5
    assert np.all(corpus[0].valores == 0.0)
    assert np.allclose(corpus[-1].valores, perfil_pegado(malla_momento(64)))
    for u in corpus[1:-1]:
        assert np.min(u.factor_hessiano) >= Q_MINIMO


def test_corpus_de_un_elemento_es_fubini_study():
    assert len(generate_corpus(0, 1, 32)) == 1


def test_count_invalido():
    with pytest.raises(ValueError):
        generate_corpus(0, 0, 32)


def test_perfil_pegado_es_c11():
    x = malla_momento(1000)
    g = perfil_pegado(x)
    derivada = np.gradient(g, x)
    assert np.max(np.abs(np.diff(derivada))) < 1e-2
    assert perfil_pegado(0.5) == pytest.approx(0.125)


def test_corpus_en_disco(tmp_path):
    corpus = generate_corpus(3, 4, 32)
    ruta = guardar_corpus(corpus, tmp_path / "corpus.json", 3)
    leido = leer_corpus(ruta)
    assert [u.n for u in leido] == [32] * 4
    assert np.array_equal(leido[2].valores, corpus[2].valores)


def test_medidas_de_prueba_son_probabilidades():
    assert medida_coseno(64).masa == pytest.approx(1.0)
    assert medida_lineal(64).masa == pytest.approx(1.0)
