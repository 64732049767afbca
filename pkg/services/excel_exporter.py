"""
Excel export of verification suite reports
Works on the dictionary form of a SuiteReport (``SuiteReport.to_dict()``), so
reports reloaded from JSON export the same way as fresh ones.
"""

import os

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

STATUS_FILLS = {
    'PASS': "C6EFCE",
    'FAIL': "FFC7CE",
    'SKIP': "FFEB9C",
}


def check_family(check):
    """'theorem1:u0:f2' -> 'theorem1'"""
    return check.split(':', 1)[0]


class ExcelExporter:
    """Writes a suite report as a workbook with a Checks and a Summary sheet"""

    def __init__(self):
        self.header_font = Font(bold=True, color="FFFFFF")
        self.header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        self.border = Border(
            left=Side(border_style="thin"),
            right=Side(border_style="thin"),
            top=Side(border_style="thin"),
            bottom=Side(border_style="thin")
        )
        self.center_alignment = Alignment(horizontal="center", vertical="center")
        self.wrap_alignment = Alignment(wrap_text=True, vertical="top")

    def export_suite_report(self, report_data, filepath):
        """
        Export a suite report to Excel format

        Args:
            report_data (dict): SuiteReport.to_dict() output
            filepath (str): Output .xlsx path; parent directories are created

        Returns:
            str: Path to the created Excel file
        """
        directory = os.path.dirname(filepath)
        if directory:
            os.makedirs(directory, exist_ok=True)

        wb = Workbook()
        ws = wb.active
        ws.title = "Checks"

        headers = ["Instance", "Check", "Family", "Status", "Detail"]
        for col_num, header in enumerate(headers, 1):
            cell = ws.cell(row=1, column=col_num, value=header)
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.alignment = self.center_alignment
            cell.border = self.border

        for row_num, result in enumerate(report_data.get('results', []), 2):
            row_data = [
                result.get('instance_id', ''),
                result.get('check', ''),
                check_family(result.get('check', '')),
                result.get('status', ''),
                result.get('detail', ''),
            ]
            for col_num, value in enumerate(row_data, 1):
                cell = ws.cell(row=row_num, column=col_num, value=value)
                cell.border = self.border
                cell.alignment = self.wrap_alignment
                if col_num == 4 and value in STATUS_FILLS:
                    colour = STATUS_FILLS[value]
                    cell.fill = PatternFill(start_color=colour, end_color=colour, fill_type="solid")

        ws.freeze_panes = "A2"
        self._auto_adjust_columns(ws)
        self._add_summary_sheet(wb, report_data)
        wb.save(filepath)
        return filepath

    def _auto_adjust_columns(self, worksheet):
        """Auto-adjust column widths based on content"""
        for column in worksheet.columns:
            column_letter = get_column_letter(column[0].column)
            max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            worksheet.column_dimensions[column_letter].width = min(max(max_length + 2, 12), 80)

    def _add_summary_sheet(self, workbook, report_data):
        ws_summary = workbook.create_sheet(title="Summary")
        summary = report_data.get('summary', {})
        config = report_data.get('config', {})

        ws_summary.cell(row=1, column=1, value="Verification Summary").font = Font(size=16, bold=True)
        row = 3
        for label, key in (("Instances", 'instances'), ("Checks", 'total_checks'), ("Passed", 'passed'),
                           ("Failed", 'failed'), ("Skipped", 'skipped'),
                           ("Hypothesis witnesses", 'hypothesis_witnesses')):
            ws_summary.cell(row=row, column=1, value=label).font = Font(bold=True)
            ws_summary.cell(row=row, column=2, value=summary.get(key, 0))
            row += 1

        row += 1
        ws_summary.cell(row=row, column=1, value="Configuration:").font = Font(bold=True)
        for key, value in config.items():
            row += 1
            if isinstance(value, (list, tuple)):
                value = ','.join(str(v) for v in value)
            ws_summary.cell(row=row, column=1, value=f"  {key}")
            ws_summary.cell(row=row, column=2, value=str(value))

        # per check family breakdown
        families = {}
        for result in report_data.get('results', []):
            counts = families.setdefault(check_family(result.get('check', '')), {'PASS': 0, 'FAIL': 0, 'SKIP': 0})
            status = result.get('status')
            if status in counts:
                counts[status] += 1

        row += 2
        for col_num, header in enumerate(["Family", "PASS", "FAIL", "SKIP"], 1):
            cell = ws_summary.cell(row=row, column=col_num, value=header)
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.border = self.border
        for family in sorted(families):
            row += 1
            ws_summary.cell(row=row, column=1, value=family).border = self.border
            for col_num, status in enumerate(('PASS', 'FAIL', 'SKIP'), 2):
                cell = ws_summary.cell(row=row, column=col_num, value=families[family][status])
                cell.border = self.border
        self._auto_adjust_columns(ws_summary)
