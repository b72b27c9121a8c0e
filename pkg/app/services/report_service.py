"""
app/services/report_service.py — Text and JSON rendering of command results.

Text reports are deterministic: reports print in the order the command
produced them, witnesses in the order the check found them, and every
residual in the input grammar so it can be pasted back into `--expr`.
"""

import json
import logging

from app.schemas.models import CheckReport, CommandResult  # type: ignore

logger = logging.getLogger(__name__)

NAME_WIDTH = 24


class ReportService:
    def format_report(self, report: CheckReport) -> list[str]:
        if report.passed:
            header = f"PASS  {report.name:<{NAME_WIDTH}} ({report.checked} checked)"
        else:
            header = f"FAIL  {report.name:<{NAME_WIDTH}} ({report.witness_count} failing of {report.checked})"
        lines = [header]
        for witness in report.witnesses:
            lines.append(f"      {witness.relation} at {witness.location}: {witness.residual}")
        hidden = report.witness_count - len(report.witnesses)
        if hidden > 0:
            lines.append(f"      ... {hidden} more")
        for note in report.notes:
            lines.append(f"      note: {note}")
        return lines

    def format_text(self, result: CommandResult) -> str:
        title = f"{result.command} {result.model}" if result.model else result.command
        lines = [f"== {title} =="]
        for name, value in result.values.items():
            lines.append(f"{name} = {value}")
        for report in result.reports:
            lines.extend(self.format_report(report))
        if result.reports:
            failed = sum(1 for r in result.reports if not r.passed)
            lines.append(f"-- {len(result.reports) - failed} passed, {failed} failed")
        return "\n".join(lines) + "\n"

    def format_json(self, result: CommandResult) -> str:
        document = result.model_dump(mode="json")
        document["passed"] = result.passed
        return json.dumps(document, indent=2, sort_keys=False) + "\n"


report_service = ReportService()
