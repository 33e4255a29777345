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

"""Logger shared by every ClrLab module.

Records go to standard error (or a file), never to standard output, which
carries the JSON report. Sweeps run in worker processes, so each record
names its process. Colour codes are used only on a terminal.

Environment Variables:

- `LOGLEVEL`: CRITICAL, ERROR, WARNING, INFO (default), DEBUG or NOTSET.
  Unknown values fall back to WARNING.
- `LOG_HANDLER`: "Stream" (default) or "File".
- `LOG_FILE_PATH`: Target of the "File" handler, default clr_lab.log.
- `EXEC_INFO`: "True" attaches tracebacks to error records.
"""

import os
import sys
import logging

EXEC_INFO = os.getenv("EXEC_INFO") == "True"
LOG_HANDLER = os.getenv("LOG_HANDLER", "Stream")
LOG_FILE_PATH = os.getenv("LOG_FILE_PATH", "clr_lab.log")
LOGLEVEL = os.getenv('LOGLEVEL', 'INFO').upper()

if LOG_HANDLER not in {"File", "Stream"}:
    LOG_HANDLER = "Stream"

if LOGLEVEL not in {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "NOTSET"}:
    LOGLEVEL = "WARNING"

RECORD_FORMAT = "%(asctime)s - %(name)s[%(processName)s] - %(levelname)s - %(message)s (%(filename)s:%(lineno)d)"  # noqa pylint: disable=C0301


class LevelColourFormatter(logging.Formatter):
    """Wraps each record in the ANSI colour of its level."""

    COLOURS = {
        logging.DEBUG: "\x1b[38;20m",
        logging.INFO: "\x1b[38;20m",
        logging.WARNING: "\x1b[33;20m",
        logging.ERROR: "\x1b[31;20m",
        logging.CRITICAL: "\x1b[31;1m",
    }
    RESET = "\x1b[0m"

    def format(self, record):
        text = super().format(record)
        colour = self.COLOURS.get(record.levelno)
        return f"{colour}{text}{self.RESET}" if colour else text


def build_handler(kind=LOG_HANDLER, path=LOG_FILE_PATH):
    """Handler for LOG_HANDLER; plain text unless writing to a terminal."""
    if kind == "File":
        handler = logging.FileHandler(path, mode="a")
        handler.setFormatter(logging.Formatter(RECORD_FORMAT))
        return handler
    handler = logging.StreamHandler(sys.stderr)
    coloured = hasattr(sys.stderr, "isatty") and sys.stderr.isatty()
    handler.setFormatter(LevelColourFormatter(RECORD_FORMAT) if coloured
                         else logging.Formatter(RECORD_FORMAT))
    return handler


logger = logging.getLogger("ClrLab")
logger.setLevel(getattr(logging, LOGLEVEL))

if not logger.handlers:
    _handler = build_handler()
    _handler.setLevel(logger.level)
    logger.addHandler(_handler)
