import numpy as np
import pytest

from conftest import N_PRUEBA, bache
from utils import fields
from utils.corpus import medida_coseno, medida_lineal
from utils.errores import CompatibilidadError, ConvergenciaError, ResolucionError
from utils.fields import (
    RESIDUO_TWISTED,
    GradientField,
    descenso_twisted,
    emparejamiento_orbita,
    energy_ev,
    futaki,
    hamiltonian,
    hamiltonian_shift_residual,
    ibp_identity_check,
    inner_product,
    lichnerowicz,
    orbit_minimize,
    orbit_ray,
    parte_no_afin,
    pendiente_loglog,
    perfil_orbita,
    perturbation_order_check,
    solve_linearized,
    twisted_residual,
)
from experimentos.identidades_campos import funciones_prueba
from utils.config import TOLERANCIAS_DEFECTO
from utils.geodesic import affine_kahler_path, subgeodesic_make, weak_geodesic
from utils.potential_model import (
    N_DEFECTO,
    SymplecticPotential,
    TwistForm,
    fubini_study,
    inverse_legendre,
    malla_momento,
)

NODOS_S = 4001
V = GradientField()


def test_hamiltoniano_de_fubini_study_es_x_menos_un_medio(fs):
    h = hamiltonian(V, fs, nodos=NODOS_S)
    assert np.allclose(h, fs.malla - 0.5, atol=1e-6)


def test_producto_interno_en_fubini_study(fs):
    assert inner_product(V, V, fs, nodos=NODOS_S) == pytest.approx(1 / 12, abs=1e-4)


def test_producto_interno_es_bilineal(fs):
    doble = V.escalado(2.0)
    assert inner_product(doble, V, fs, nodos=NODOS_S) == pytest.approx(2 * inner_product(V, V, fs, nodos=NODOS_S))


def test_futaki_nulo_en_fubini_study(fs):
    assert futaki(V, fs, nodos=NODOS_S) == pytest.approx(0.0, abs=1e-10)


def test_futaki_nulo_en_una_metrica_asimetrica():
    x = malla_momento(N_DEFECTO)
    u = SymplecticPotential(bache(N_DEFECTO).valores + 0.1 * x**3)
    assert abs(futaki(V, u)) < TOLERANCIAS_DEFECTO["futaki"]


def test_energia_v_no_depende_del_camino():
    n = 128
    x = malla_momento(n)
    u0 = fubini_study(n)
    u1 = SymplecticPotential(bache(n).valores + 0.3 * x)
    caminos = [
        weak_geodesic(u0, u1, 5),
        affine_kahler_path(u0, u1, 5),
        subgeodesic_make(u0, u1, 0.5, t_nodos=5),
    ]
    incrementos = [energy_ev(camino, V).valores[-1] for camino in caminos]
    assert incrementos[0] == pytest.approx(-0.3 / 12, abs=1e-5)
    for incremento in incrementos[1:]:
        assert incremento == pytest.approx(incrementos[0], abs=TOLERANCIAS_DEFECTO["independencia_camino"])


def test_perfil_de_orbita_es_convexo_y_propio(fs):
    tiempos, perfil = perfil_orbita(fs, medida_lineal(N_PRUEBA), V, 3.0, 21)
    assert tiempos[0] == pytest.approx(-3.0) and tiempos[-1] == pytest.approx(3.0)
    assert perfil[1] < perfil[0]
    assert perfil[-1] > perfil[-2]
    assert np.min(np.diff(perfil, 2)) >= -1e-10
    assert 0 < int(np.argmin(perfil)) < perfil.size - 1


def test_corrimiento_del_hamiltoniano(fs):
    assert hamiltonian_shift_residual(V, fs, nodos=NODOS_S) < TOLERANCIAS_DEFECTO["lema_hamiltoniano"]
    assert hamiltonian_shift_residual(V, bache(256), nodos=NODOS_S) < TOLERANCIAS_DEFECTO["lema_hamiltoniano"]


@pytest.mark.parametrize("amplitud", [0.0, 0.5])
def test_integracion_por_partes_a_la_resolucion_de_trabajo(amplitud):
    u = bache(N_DEFECTO, amplitud)
    s = inverse_legendre(u).s_grid
    f, g = funciones_prueba(s)
    assert ibp_identity_check(f, g, u) <= TOLERANCIAS_DEFECTO["lema_ibp"]
    assert ibp_identity_check(f, f, u) <= 1e-6


def test_integracion_por_partes_con_funcion_constante(fs):
    s = inverse_legendre(fs).s_grid
    assert ibp_identity_check(np.ones_like(s), np.exp(-s**2 / 2), fs) == pytest.approx(0.0, abs=1e-12)


def test_lichnerowicz_anula_constantes_y_la_hamiltoniana(suave):
    operador = lichnerowicz(suave)
    assert operador.residuo_autoadjunto() == 0.0
    nucleo = operador.matriz @ operador.nucleo()
    assert np.max(np.abs(nucleo)) / np.max(np.abs(operador.matriz)) < 1e-10
    v = np.cos(2 * np.pi * suave.malla)
    assert operador.forma(v, v) > 0


def test_lichnerowicz_exige_malla_minima():
    with pytest.raises(ResolucionError):
        lichnerowicz(fubini_study(8))


def test_ecuacion_linealizada_compatible(suave):
    nu = np.cos(2 * np.pi * suave.malla)
    solucion = solve_linearized(suave, nu)
    assert solucion.residuo < 1e-8
    assert abs(np.sum(solucion.v)) < 1e-8


def test_ecuacion_linealizada_incompatible(suave):
    nu = np.cos(2 * np.pi * suave.malla) + 0.1
    with pytest.raises(CompatibilidadError) as error:
        solve_linearized(suave, nu)
    assert error.value.emparejamiento == pytest.approx(0.1, abs=1e-9)


def test_ecuacion_linealizada_rechaza_el_hamiltoniano(suave):
    with pytest.raises(CompatibilidadError) as error:
        solve_linearized(suave, V.hamiltonian_in_x(suave.malla))
    assert abs(error.value.emparejamiento) > 1e-3


def test_orden_de_la_perturbacion(fs):
    pasos = np.geomspace(1e-3, 1e-1, 5)
    mu = medida_coseno(N_PRUEBA)
    con_v0 = perturbation_order_check(fs, mu, pasos, usar_v0=True)
    control = perturbation_order_check(fs, mu, pasos, usar_v0=False)
    assert pendiente_loglog(pasos, con_v0) >= 1.9
    assert pendiente_loglog(pasos, control) == pytest.approx(1.0, abs=1e-6)


def test_rayo_de_orbita_es_geodesico(fs):
    rayo = orbit_ray(fs, V, 2.0, t_nodos=5)
    assert rayo.tipo == "geodesic"
    assert rayo.tiempos[-1] == pytest.approx(2.0)
    assert np.allclose(rayo.fin.valores, -4.0 * fs.malla)


def test_minimo_en_la_orbita_de_una_medida_simetrica(fs):
    mu = medida_coseno(N_PRUEBA)
    assert emparejamiento_orbita(fs, mu, V) == pytest.approx(0.0, abs=1e-12)
    assert orbit_minimize(fs, mu, V, t_max=2.0, nodos=21) == pytest.approx(0.0, abs=1e-6)


def test_fubini_study_resuelve_la_ecuacion_con_torsion():
    alpha = TwistForm.multiplo_fs(0.2, 32)
    u = fubini_study(32)
    assert twisted_residual(u, alpha) < 1e-10
    limite, traza = descenso_twisted(alpha, u)
    assert len(traza) == 1
    assert list(traza.columns) == ["iter", "value", "grad_norm", "residual"]


def test_descenso_con_torsion_converge_a_fubini_study():
    alpha = TwistForm.multiplo_fs(0.2, 32)
    limite, traza = descenso_twisted(alpha, bache(32, amplitud=1.0), max_iter=50)
    assert traza["residual"].iloc[-1] < 1e-6
    assert np.max(np.abs(limite.valores - limite.valores.mean())) < 1e-3


def test_parte_no_afin_ignora_la_orbita(fs):
    desplazado = fubini_study(N_PRUEBA).valores - 3.0 * fs.malla + 1.0
    assert np.allclose(parte_no_afin(SymplecticPotential(desplazado)), 0.0, atol=1e-12)


def test_busqueda_lineal_agotada_lejos_de_la_solucion(monkeypatch):
    monkeypatch.setattr(fields, "funcional_twisted_torico", lambda u, alpha: np.inf)
    alpha = TwistForm.multiplo_fs(0.2, 32)
    with pytest.raises(ConvergenciaError) as error:
        descenso_twisted(alpha, bache(32, amplitud=1.0))
    assert len(error.value.historial) == 1
    assert error.value.historial[0] > RESIDUO_TWISTED


def test_busqueda_lineal_agotada_junto_a_la_solucion(monkeypatch):
    monkeypatch.setattr(fields, "funcional_twisted_torico", lambda u, alpha: np.inf)
    alpha = TwistForm.multiplo_fs(0.2, 32)
    u = fubini_study(32)
    limite, traza = descenso_twisted(alpha, u, tol=0.0)
    assert limite is u
    assert traza["residual"].iloc[-1] < RESIDUO_TWISTED
