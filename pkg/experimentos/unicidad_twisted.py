import logging
from itertools import combinations

import numpy as np
import pandas as pd

from experimentos import registrar_experimento
from experimentos.ejecucion import grupos, lineas
from utils.corpus import generate_corpus
from utils.errores import ConfiguracionError
from utils.fields import descenso_twisted, parte_no_afin, twisted_residual
from utils.potential_model import TwistForm

logger = logging.getLogger(__name__)

registrar_experimento(
    __name__,
    nombre="uniqueness-twisted",
    descripcion="Unicidad de la métrica de curvatura escalar constante con torsión: descensos desde varios inicios.",
    columnas=(
        "twisted_traces.csv: start, alpha, iter, value, grad_norm, residual; "
        "twisted_limits_positive.csv y twisted_limits_zero.csv: x, start_NN"
    ),
    defectos={"count": 5, "grid": {"n": 256}},
)

MULTIPLO_ALPHA = 0.2
INICIOS_MINIMOS = 3


def _normalizada(u):
    """g menos su media: la torsión positiva fija el límite módulo constantes."""
    return u.valores - float(np.sum(u.pesos * u.valores))


def ejecutar(cfg, bitacora):
    malla = cfg.grid
    tol = cfg.tol("unicidad")
    corpus = generate_corpus(cfg.seed, cfg.count, malla.n)
    # el perfil C^{1,1} del final no es un inicio admisible para el descenso de cuarto orden
    inicios = corpus[1:-1] if len(corpus) > 2 else []
    if len(inicios) < INICIOS_MINIMOS:
        raise ConfiguracionError([f"count: se necesitan al menos {INICIOS_MINIMOS + 2} potenciales"])

    trazas = []
    for etiqueta, multiplo, forma in (("positive", MULTIPLO_ALPHA, _normalizada), ("zero", 0.0, parte_no_afin)):
        alpha = TwistForm.multiplo_fs(multiplo, malla.n)
        limites = {}
        for indice, inicio in enumerate(inicios):
            limite, traza = descenso_twisted(alpha, inicio)
            traza.insert(0, "alpha", etiqueta)
            traza.insert(0, "start", indice)
            trazas.append(traza)
            limites[indice] = forma(limite)
            bitacora.medida(f"residuo_{etiqueta}_{indice:02d}", twisted_residual(limite, alpha))
            # Fubini-Study es el único punto crítico (módulo la órbita cuando α = 0)
            bitacora.maximo(f"recupera_fs_{etiqueta}_{indice:02d}", float(np.max(np.abs(limites[indice]))), tol)

        for a, b in combinations(limites, 2):
            distancia = float(np.max(np.abs(limites[a] - limites[b])))
            bitacora.maximo(f"acuerdo_{etiqueta}_{a:02d}_{b:02d}", distancia, tol)

        tabla = pd.DataFrame({"x": corpus[0].malla, **{f"start_{i:02d}": v for i, v in limites.items()}})
        bitacora.tabla(
            f"twisted_limits_{etiqueta}", tabla,
            lineas("x", [c for c in tabla.columns if c != "x"], f"Límites del descenso (α {etiqueta})", "x", "g"),
        )

    bitacora.tabla(
        "twisted_traces", pd.concat(trazas, ignore_index=True),
        grupos("iter", "residual", "start", "Residuo del descenso", "iteración", "residuo", log_y=True),
    )
