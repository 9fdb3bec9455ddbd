from typing import List

import pandas as pd

from common.data import RunReport


def summary_df(report: RunReport) -> pd.DataFrame:
    """One row per entry of every command: command, subject, outcome."""
    rows: List[dict] = []
    for command, entries in sorted(report.to_json()["results"].items()):
        for entry in entries:
            subject = entry.get("pair") or [entry.get("module", "")]
            if "status" in entry:
                outcome = entry["status"]
            elif "passed" in entry:
                outcome = "pass" if entry["passed"] else "fail"
            else:
                outcome = f"rank {entry.get('rank')}"
            rows.append(
                {
                    "command": command,
                    "subject": " ".join(str(name) for name in subject),
                    "outcome": outcome,
                }
            )
    return pd.DataFrame(rows, columns=["command", "subject", "outcome"])


def summary_counts(report: RunReport) -> pd.DataFrame:
    df = summary_df(report)
    if df.empty:
        return df
    return (
        df.groupby(["command", "outcome"]).size().rename("count").reset_index()
    )


def summary_text(report: RunReport) -> str:
    df = summary_df(report)
    if df.empty:
        return "no results"
    verdict = "PASS" if report.passed else "FAIL"
    return f"{df.to_string(index=False)}\n\n{verdict}"
