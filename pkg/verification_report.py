#!/usr/bin/python

# Copyright 2025 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License


"""Generates an Excel workbook summarizing verification suites.

One sheet per suite lists every (instance, bound) comparison, a ledger
sheet collects the violations, and a summary sheet shows PASSED/FAILED
per suite through worksheet formulas.
"""

import json
import xlsxwriter  # pylint: disable=E0401
from report_mapping.header_mapping import (
    suite_sheet_mapping, violations_mapping, report_summary)
from base_logger import logger


class VerificationReport():
    """Writes verification suite summaries to an xlsx workbook."""

    def __init__(self, workbookname, summaries):
        """Initializes the VerificationReport object.

        Args:
            workbookname (str): Path of the workbook to create.
            summaries (dict): Suite name → summary as returned by
                `DominanceValidator.run_suite`.
        """
        self.workbook = xlsxwriter.Workbook(workbookname)
        self.summaries = summaries
        self.heading_format = self.workbook.add_format(
            {'bold': True, 'bg_color': 'lightblue', 'font_color': 'white'})
        self.danger_format = self.workbook.add_format({'bg_color': '#f5cbcc'})
        self.green_format = self.workbook.add_format({'bg_color': '#5fbd76'})
        self.info_format = self.workbook.add_format(
            {'bg_color': '#4285f4', 'font_color': 'white',
             'border': 1, 'text_wrap': True, 'font_size': 12,
             'valign': 'top'})
        self.info_bold_format = self.workbook.add_format(
            {'bg_color': '#4285f4', 'font_color': 'white',
             'border': 1, 'text_wrap': True, 'bold': True,
             'font_size': 18})
        self.info_bold_underline_format = self.workbook.add_format(
            {'bg_color': '#4285f4', 'font_color': 'white', 'border': 1,
             'text_wrap': True, 'bold': True, 'underline': True,
             'font_size': 14})
        self.summary_main_header_format = self.workbook.add_format(
            {'bg_color': '#4285f4', 'font_color': 'white', 'border': 1,
             'text_wrap': True, 'bold': True, 'font_size': 24,
             'valign': 'center'})
        self.summary_block_header_format = self.workbook.add_format(
            {'bg_color': '#000000', 'font_color': 'white', 'border': 1,
             'text_wrap': True, 'font_size': 18, 'valign': 'center'})
        self.summary_link_format = self.workbook.add_format(
            {'border': 1, 'text_wrap': True, 'underline': True,
             'font_size': 16, 'font_color': 'blue'})
        self.summary_format = self.workbook.add_format(
            {'border': 1, 'text_wrap': True, 'font_size': 16,
             'font_color': 'black'})
        self.summary_note_blue_format = self.workbook.add_format(
            {'border': 1, 'text_wrap': True, 'font_size': 13,
             'font_color': 'blue', 'valign': 'center', 'align': 'center'})
        self.summary_note_green_format = self.workbook.add_format(
            {'border': 1, 'text_wrap': True, 'font_size': 13,
             'font_color': 'green', 'valign': 'center', 'align': 'center'})
        self.summary_cell_danger_format = self.workbook.add_format(
            {'bg_color': '#f5cbcc', 'valign': 'vcenter', 'align': 'center',
             'border': 1, 'text_wrap': True, 'font_size': 16})
        self.summary_cell_green_format = self.workbook.add_format(
            {'bg_color': '#5fbd76', 'valign': 'vcenter', 'align': 'center',
             'border': 1, 'text_wrap': True, 'font_size': 16})

    def report_heading(self, headers, sheet):
        """Writes column headings to a given worksheet."""
        for col, val in enumerate(headers):
            sheet.write(0, col, val, self.heading_format)
            sheet.set_column(col, col, len(val) + 1)

    def get_final_info_text_and_format_arr(self, full_text):
        """Alternating format objects and text lines for a rich string.

        Lines starting with <b> are bold, <bu> bold underlined.
        """
        final_text = []
        for line in full_text.split('\n'):
            if line.startswith('<b>'):
                final_text.extend([self.info_bold_format,
                                   line.split('<b>')[1] + '\n'])
            elif line.startswith('<bu>'):
                final_text.extend([self.info_bold_underline_format,
                                   line.split('<bu>')[1] + '\n'])
            else:
                final_text.extend([self.info_format, line + '\n'])
        final_text.append(self.info_format)
        return final_text

    def report_info_box(self, mapping_json, sheet):
        """Creates the information box to the right of the table."""
        block = mapping_json['info_block']
        first = len(mapping_json['headers']) + 1
        last = first + int(block['col_merge']) - 1
        width = len(block['text'].split('\n')[int(block['text_line_no_for_col_count'])])  # noqa pylint: disable=C0301
        sheet.set_column(first, last, width / int(block['col_merge']))
        sheet.merge_range(int(block['start_row']) - 1, first,
                          int(block['end_row']) - 1, last, '',
                          self.info_format)
        sheet.write_rich_string(int(block['start_row']) - 1, first,
                                *self.get_final_info_text_and_format_arr(block['text']))  # noqa pylint: disable=C0301

    def report_suite(self, name, summary):
        """Generates the sheet of one suite."""
        logger.info(f'------------------- Suite {name} -----------------------')  # noqa pylint: disable=W1203
        sheet = self.workbook.add_worksheet(name=name[:31])
        self.report_heading(suite_sheet_mapping['headers'], sheet)
        row = 1
        for record in summary.get('records', []):
            violated = {v['bound'] for v in record.get('violations', [])}
            for bound, entry in record.get('bounds', {}).items():
                value = entry.get('value')
                if value is None:
                    continue
                dominates = bound not in violated
                sheet.write(row, 0, record['index'])
                sheet.write(row, 1, json.dumps(record['potential']))
                sheet.write(row, 2, json.dumps(record.get('case', {})))
                sheet.write(row, 3, entry.get('exact', record['exact']))
                sheet.write(row, 4, bool(record.get('converged')))
                sheet.write(row, 5, bound)
                sheet.write(row, 6, value if value != float('inf') else 'inf')
                sheet.write(row, 7, entry.get('status'))
                sheet.write(row, 8, dominates,
                            self.green_format if dominates else self.danger_format)  # noqa pylint: disable=C0301
                row += 1
        self.report_info_box(suite_sheet_mapping, sheet)
        sheet.autofit()

    def report_violations(self):
        """Generates the "Violations" sheet."""
        logger.info('------------------- Violations -----------------------')
        sheet = self.workbook.add_worksheet(name='Violations')
        self.report_heading(violations_mapping['headers'], sheet)
        row = 1
        for name, summary in self.summaries.items():
            for violation in summary.get('violations', []):
                values = [name, violation.get('index'), violation.get('bound'),
                          violation.get('value'), violation.get('exact'),
                          json.dumps(violation.get('potential')),
                          json.dumps(violation.get('case', {}))]
                for col, value in enumerate(values):
                    sheet.write(row, col, value, self.danger_format)
                row += 1
        self.report_info_box(violations_mapping, sheet)
        sheet.autofit()

    def report_summary(self):
        """Generates the "Verification Summary" sheet."""
        logger.info('------------------- Verification Summary -----------------------')  # noqa pylint: disable=C0301
        sheet = self.workbook.add_worksheet(name='Verification Summary')
        sheet.set_column(0, 1, int(report_summary['col_width']) + 1)
        header_row = int(report_summary['header_row'])
        sheet.merge_range(f'A{header_row}:B{header_row}',
                          report_summary['header_text'],
                          self.summary_main_header_format)
        row = header_row + 1
        sheet.merge_range(f'A{row}:B{row}', report_summary['block_header'],
                          self.summary_block_header_format)
        row += 1
        for name in self.summaries:
            sheet_name = name[:31]
            sheet.write_url(f'A{row}', f"internal:'{sheet_name}'!A1",
                            self.summary_link_format, string=name)
            sheet.write_formula(
                f'B{row}', report_summary['result_col'].replace('{sheet}', sheet_name),  # noqa pylint: disable=C0301
                cell_format=self.summary_format,
                value='FAILED' if self.summaries[name].get('violations') else 'PASSED')  # noqa pylint: disable=C0301
            for text, cell_format in (('PASSED', self.summary_cell_green_format),
                                      ('FAILED', self.summary_cell_danger_format)):  # noqa pylint: disable=C0301
                sheet.conditional_format(f'B{row}:B{row}', {
                    'type': 'text', 'criteria': 'containing',
                    'value': text, 'format': cell_format})
            row += 1
        row += report_summary['note_list']['skip_rows']
        for note in report_summary['note_list']['notes']:
            note_format = self.summary_note_blue_format \
                if note['bg_color'] == 'blue' else self.summary_note_green_format  # noqa pylint: disable=C0301
            sheet.merge_range(f'A{row}:B{row}', note['text'], note_format)
            row += 1

    def write(self):
        """Writes every sheet, summary first."""
        self.report_summary()
        for name, summary in self.summaries.items():
            self.report_suite(name, summary)
        self.report_violations()

    def close(self):
        """Closes the Excel workbook."""
        self.workbook.close()
