# panic_forecast_tool/metrics/report.py
# All comments and identifiers in English

import logging
import os

import pandas as pd

from ..data_models.eval_types import EvalReport
from ..project_io.json_handler import save_json_document

logger = logging.getLogger(__name__)

DISPLAY_NAMES = {"Panic": "Panic", "NoPanic": "No Panic"}
CSV_COLUMNS = ["class", "precision", "recall", "f1", "support", "accuracy", "auc"]


def report_frame(report: EvalReport) -> pd.DataFrame:
    """Panic / No Panic / Average rows; accuracy and AUC only on the Average row."""
    records = [{
        "class": DISPLAY_NAMES.get(row.class_name, row.class_name),
        "precision": row.precision,
        "recall": row.recall,
        "f1": row.f1,
        "support": row.support,
        "accuracy": None,
        "auc": None,
    } for row in report.rows]
    records.append({
        "class": "Average",
        "precision": report.macro_precision,
        "recall": report.macro_recall,
        "f1": report.macro_f1,
        "support": report.evaluated_count,
        "accuracy": report.accuracy,
        "auc": report.auc,
    })
    frame = pd.DataFrame.from_records(records, columns=CSV_COLUMNS)
    frame["support"] = frame["support"].astype(int)
    return frame


def emit_report(report: EvalReport, json_path: str, csv_path: str) -> None:
    """Full precision in JSON; the CSV is rounded to two decimals."""
    save_json_document(report.to_dict(), json_path)
    os.makedirs(os.path.dirname(os.path.abspath(csv_path)), exist_ok=True)
    report_frame(report).to_csv(csv_path, index=False, float_format="%.2f", lineterminator="\n")
    logger.info("Evaluation report saved successfully to %s and %s", json_path, csv_path)
