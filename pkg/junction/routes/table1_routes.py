import argparse
import logging
from typing import Dict, NamedTuple

import pandas as pd

from junction.errors import JunctionError
from junction.routes.base import CommandRouter, load_config
from junction.services.case_service import CaseService
from junction.services.io_service import ArtifactWriter
from junction.services.model_service import validate_params

logger = logging.getLogger(__name__)

router = CommandRouter()

TAU_PLUS = 0.6
C0 = 1.0 / 3.0


class PublishedRow(NamedTuple):
    nu: float
    delta_j: float
    nu_e_max_sq: float
    delta_1: float
    n3: int
    n7: int
    label: str


# Apparently convergent examples at tau_plus = 0.6, c0 = 1/3.
PUBLISHED = (
    PublishedRow(0.1, -0.5, 0.13, 0.013, 2, 7, "B"),
    PublishedRow(0.5, 1.5, 5.2, 0.13, 6, 21, "A"),
    PublishedRow(1.1, -1.0, 4.5, 0.049, 4, 11, "B"),
    PublishedRow(2.5, -2.0, 38.0, 0.16, 11, 42, "B"),
    PublishedRow(3.5, 2.0, 61.0, 0.17, 10, 43, "A"),
    PublishedRow(10.0, 1.0, 42.0, 0.044, 3, 12, "A"),
)


def compare_row(index: int, published: PublishedRow, computed: Dict) -> Dict:
    return {
        "row": index,
        "nu": published.nu,
        "delta_j": published.delta_j,
        "class_published": published.label,
        "class": computed.get("class"),
        "nu_e_max_sq_published": published.nu_e_max_sq,
        "nu_e_max_sq": computed.get("nu_e_max_sq"),
        "delta_1_published": published.delta_1,
        "delta_1": computed.get("delta_1"),
        "n3_published": published.n3,
        "n3": computed.get("n3"),
        "n7_published": published.n7,
        "n7": computed.get("n7"),
        "verdict": computed.get("verdict"),
        "error": computed.get("error"),
    }


@router.command("table1", help="rerun the six published convergent cases side by side")
def table1_command(args: argparse.Namespace) -> int:
    config = load_config(args, "table1")
    rows = []
    failed = 0
    for index, published in enumerate(PUBLISHED, start=1):
        try:
            p = validate_params(nu=published.nu, tau_plus=TAU_PLUS, c0=C0,
                                delta_j=published.delta_j)
            trace = CaseService(config).run(p).trace
            computed = {"class": None if trace.class_label is None else trace.class_label.value,
                        "nu_e_max_sq": trace.nu_e_max_sq, "delta_1": trace.delta_1,
                        "n3": trace.n3, "n7": trace.n7, "verdict": trace.verdict.value}
        except JunctionError as exc:
            logger.error("table row %d failed: %s", index, exc)
            computed = {"error": f"{type(exc).__name__}: {exc}"}
            failed += 1
        rows.append(compare_row(index, published, computed))
    frame = pd.DataFrame(rows)
    ArtifactWriter(config.out, config.formats).write_table(frame, "table1")
    columns = ["row", "nu", "delta_j", "class_published", "class", "nu_e_max_sq_published",
               "nu_e_max_sq", "delta_1_published", "delta_1", "n3_published", "n3",
               "n7_published", "n7"]
    with pd.option_context("display.width", 200, "display.max_columns", None):
        print(frame[columns].to_string(index=False))
    return 1 if failed else 0
