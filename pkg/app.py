"""
Laboratorio numérico de métricas de Kähler S¹-invariantes en la esfera de Riemann.

    python app.py run convexity --grid-n 512 --out resultados
    python app.py run bergman-tv --k 16,32,64
    python app.py corpus --seed 0 --count 21 --out corpus.json
"""

import argparse
import logging
import sys
from pathlib import Path

from experimentos import cargar_experimentos
from experimentos.ejecucion import ejecutar
from utils.config import cargar_config, parsear_lista_k, parsear_tolerancias
from utils.corpus import generate_corpus, guardar_corpus
from utils.errores import ConfiguracionError, LaboratorioError, ToleranciaError
from utils.potential_model import N_DEFECTO

logger = logging.getLogger("app")


def construir_parser(experimentos):
    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Laboratorio de geodésicas, K-energía y núcleos de Bergman en CP¹.",
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    subparsers = parser.add_subparsers(dest="comando", required=True)

    columnas = "\n".join(
        f"  {nombre}: {e.descripcion}\n      {e.columnas}" for nombre, e in experimentos.items()
    )
    run = subparsers.add_parser(
        "run",
        help="corre un experimento y escribe CSV, scripts de gráficos y manifiesto",
        epilog="Experimentos y columnas CSV:\n" + columnas,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    run.add_argument("experimento", choices=list(experimentos))
    run.add_argument("--config", type=Path, help="archivo JSON de configuración")
    run.add_argument("--out", help="directorio de resultados")
    run.add_argument("--seed", type=int)
    run.add_argument("--k", help="lista de k separada por comas, p. ej. 16,32,64")
    run.add_argument("--grid-n", type=int, help="intervalos de la malla de momento")
    run.add_argument("--t-nodes", type=int, help="nodos en t de las trayectorias")
    run.add_argument("--count", type=int, help="tamaño del corpus")
    run.add_argument("--tol-override", action="append", default=[], metavar="CLAVE=VALOR")

    corpus = subparsers.add_parser("corpus", help="genera el corpus de potenciales y lo guarda en JSON")
    corpus.add_argument("--seed", type=int, default=0)
    corpus.add_argument("--count", type=int, default=21)
    corpus.add_argument("--grid-n", type=int, default=N_DEFECTO)
    corpus.add_argument("--out", type=Path, default=Path("corpus.json"))
    return parser


def sobrescrituras(args):
    """Banderas de la línea de comandos en el formato de cargar_config."""
    return {
        "output_dir": args.out,
        "seed": args.seed,
        "count": args.count,
        "k_list": parsear_lista_k(args.k) if args.k is not None else None,
        "grid": {"n": args.grid_n, "t_nodos": args.t_nodes},
        "tolerancias": parsear_tolerancias(args.tol_override),
    }


def correr(args, experimentos):
    experimento = experimentos[args.experimento]
    cfg = cargar_config(
        args.experimento,
        ruta=args.config,
        defectos=experimento.defectos,
        sobrescrituras=sobrescrituras(args),
        experimentos_validos=experimentos,
    )
    return ejecutar(cfg)


def crear_corpus(args):
    if args.count < 1 or args.grid_n < 1:
        raise ConfiguracionError(["count y grid-n deben ser positivos"])
    ruta = guardar_corpus(generate_corpus(args.seed, args.count, args.grid_n), args.out, args.seed)
    logger.info("Corpus guardado en %s", ruta)
    return 0


def main(argv=None):
    experimentos = cargar_experimentos()
    args = construir_parser(experimentos).parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.comando == "corpus":
            return crear_corpus(args)
        return correr(args, experimentos)
    except ConfiguracionError as error:
        logger.error("%s", error)
        return 2
    except ToleranciaError as error:
        logger.error("Comprobación fallida: %s", error)
        return 1
    except LaboratorioError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return 1


if __name__ == "__main__":
    sys.exit(main())
