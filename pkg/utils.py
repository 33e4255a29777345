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

"""Utilities shared by the ClrLab modules.

This module provides helper functions for parsing configurations,
managing files and directories, serializing reports to JSON and CSV,
and handling parallel execution of independent sweep instances.
"""
import os
import csv
import json
import math
import datetime
import configparser
import concurrent.futures
import dataclasses
from time import sleep
import numpy as np
from base_logger import logger, EXEC_INFO
from errors import ValidationError

SCHEMA_VERSION = "1"
BACKEND_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                              'backend.properties')


def parse_config(config_file):
    """Parses a configuration file.

    Args:
        config_file: The path to the configuration file.

    Returns:
        A ConfigParser object.

    Raises:
        ValidationError: If the file is missing or has no sections.
    """
    config = configparser.ConfigParser()
    config.optionxform = str.lower
    config.read(config_file)
    if len(config.sections()) == 0:
        logger.error(
            f'Unable to read {config_file} file.')   # noqa pylint: disable=W1203
        raise ValidationError('configuration file missing or empty',
                              {'file': config_file})
    return config


def load_backend_config():
    """Reads the internal defaults shipped next to this module."""
    return parse_config(BACKEND_CONFIG)


def get_env_variable(key):
    """Retrieves the value of an environment variable.

    Args:
        key: The name of the environment variable.

    Returns:
        The value of the environment variable, or None
        if it is not set.
    """
    if key is not None:
        value = os.getenv(key)
        if value is not None:
            return value
    return None


def worker_count(backend_cfg=None):
    """Number of parallel workers, capped by CLR_LAB_THREADS.

    Args:
        backend_cfg: Optional parsed backend.properties.

    Returns:
        int: At least 1.
    """
    workers = os.cpu_count() or 1
    if backend_cfg is not None:
        workers = min(workers, backend_cfg.getint('parallel', 'WORKERS',
                                                  fallback=workers))
    cap = get_env_variable('CLR_LAB_THREADS')
    if cap is not None:
        try:
            workers = min(workers, int(cap))
        except ValueError:
            logger.warning(f"Ignoring CLR_LAB_THREADS={cap!r}")  # noqa pylint: disable=W1203
    return max(1, workers)


def create_dir(dir_name):
    """Creates a directory if it doesn't exist.

    Args:
        dir_name: The name of the directory to create.
    """
    try:
        os.makedirs(dir_name)
    except FileExistsError:
        logger.debug(f"Directory \"{dir_name}\" already exists", exc_info=EXEC_INFO)  # noqa pylint: disable=W1203


def list_dir(dir_name, isok=False):
    """Lists the contents of a directory.

    Args:
        dir_name: The name of the directory.
        isok: If True, returns an empty list if the directory
            doesn't exist.

    Returns:
        A list of directory contents.
    """
    try:
        return sorted(os.listdir(dir_name))
    except FileNotFoundError:
        if isok:
            logger.debug(f"Ignoring : Directory \"{dir_name}\" not found")  # noqa pylint: disable=W1203
            return []
        logger.error(f"Directory \"{dir_name}\" not found", exc_info=EXEC_INFO)  # noqa pylint: disable=W1203
        raise


def parse_json(file):
    """Parses a JSON file.

    Args:
        file: The path to the JSON file.

    Returns:
        The parsed JSON data, or an empty dictionary
        if the file is not found.
    """
    try:
        with open(file) as fl:  # noqa pylint: disable=W1514
            doc = json.loads(fl.read())
        return doc
    except FileNotFoundError:
        logger.debug(f"File \"{file}\" not found", exc_info=EXEC_INFO)  # noqa pylint: disable=W1203
    return {}


def write_json(file, data):
    """Writes JSON data to a file.

    Args:
        file: The file path to write to.
        data: The JSON data to write.

    Returns:
        True if successful, False otherwise.
    """
    try:
        logger.info(f"Writing JSON to File {file}")  # noqa pylint: disable=W1203
        with open(file, 'w') as fl:  # noqa pylint: disable=W1514
            fl.write(json.dumps(to_jsonable(data), indent=2))
    except FileNotFoundError:
        logger.error(f"File \"{file}\" not found", exc_info=EXEC_INFO)  # noqa pylint: disable=W1203
        return False
    return True


def to_jsonable(obj):
    """Converts numpy scalars, arrays, tuples and dataclasses to JSON types."""
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def serialize_report(command, operator, result, seed=None, canonical=False):
    """Builds the normative JSON envelope of a command result.

    Floats are written with repr, the shortest string that round-trips to
    the same binary64 value; infinities are written as `Infinity`.

    Args:
        command (str): Subcommand name.
        operator (dict): Operator/potential description.
        result (dict): Command result.
        seed (int, optional): RNG seed of randomized commands.
        canonical (bool): Drop the timestamp so repeated runs compare
            byte-identical.

    Returns:
        str: The JSON document.
    """
    timestamp = None
    if not canonical:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    envelope = {
        'schema_version': SCHEMA_VERSION,
        'command': command,
        'operator': to_jsonable(operator),
        'result': to_jsonable(result),
        'seed': seed,
        'timestamp': timestamp,
    }
    return json.dumps(envelope, indent=2, sort_keys=canonical)


def parse_report(text):
    """Parses a serialized report envelope back to a dictionary."""
    return json.loads(text)


def flatten(data, prefix=''):
    """Flattens nested dictionaries to dotted keys for CSV export.

    Args:
        data (dict): Nested mapping.
        prefix (str): Key prefix for recursion.

    Returns:
        dict: Flat mapping of scalar values.
    """
    flat = {}
    for key, value in data.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            flat.update(flatten(value, name))
        elif isinstance(value, (list, tuple)):
            flat[name] = json.dumps(to_jsonable(value))
        else:
            flat[name] = value
    return flat


def write_csv_report(file_name, header, rows):
    """Writes data to a CSV file.

    Args:
        file_name: The name of the CSV file.
        header: The header row.
        rows: The data rows.
    """
    with open(file_name, 'w', newline='') as file:  # noqa pylint: disable=W1514
        writer = csv.writer(file)
        writer.writerow(header)
        for each_row in rows:
            writer.writerow(each_row)


def write_table_csv(file_name, records):
    """Writes a list of (possibly nested) records as one flat CSV table."""
    flat_rows = [flatten(to_jsonable(r)) for r in records]
    header = []
    for row in flat_rows:
        for key in row:
            if key not in header:
                header.append(key)
    write_csv_report(file_name, header,
                     [[row.get(k, '') for k in header] for row in flat_rows])


def finite_or_inf(value):
    """Maps NaN to infinity so a failed sum never reads as a small bound."""
    value = float(value)
    if math.isnan(value):
        return math.inf
    return value


def run_parallel(func, args, workers=10,
                 max_retries=3, retry_delay=1):
    """Runs a function in parallel with multiple arguments.

    Results come back in the order of `args` regardless of completion
    order, so reports do not depend on scheduling.

    Args:
        func: Function to execute; must be picklable.
        args: Arguments for the function.
        workers: Number of workers.
        max_retries: Max retry attempts.
        retry_delay: Retry delay.

    Returns:
        List of results. A task that keeps failing yields the exception
        instance in its slot.
    """
    args = list(args)
    if workers <= 1 or len(args) <= 1:
        return [_run_with_retry(func, arg, max_retries, retry_delay)
                for arg in args]

    data = [None] * len(args)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:  # noqa
        # Initial futures (future: (index, retry_count))
        future_to_idx_retry = {executor.submit(func, arg): (idx, 0) for idx, arg in enumerate(args)}  # noqa

        while future_to_idx_retry:
            done, _ = concurrent.futures.wait(future_to_idx_retry, return_when=concurrent.futures.FIRST_COMPLETED)   # noqa pylint: disable=C0301
            for future in done:
                idx, retry_count = future_to_idx_retry.pop(future)
                try:
                    data[idx] = future.result()
                except Exception as exc:   # noqa pylint: disable=W1203,W0718
                    if retry_count < max_retries:
                        retry_count += 1
                        logger.warning(  # noqa pylint: disable=W1203
                            f"Task {idx} failed ({retry_count}/{max_retries} retries), retrying in {retry_delay} seconds...",   # noqa pylint: disable=C0301,W1203
                            exc_info=EXEC_INFO,
                        )
                        sleep(retry_delay)
                        future_to_idx_retry[executor.submit(func, args[idx])] = (idx, retry_count)   # noqa pylint: disable=C0301
                    else:
                        data[idx] = exc
                        logger.error(  # noqa pylint: disable=W1203
                            f"Task {idx} failed with {exc} after {max_retries} retries.",   # noqa pylint: disable=C0301
                            exc_info=EXEC_INFO
                        )
    return data


def _run_with_retry(func, arg, max_retries, retry_delay):
    retry_count = 0
    while True:
        try:
            return func(arg)
        except Exception as exc:   # noqa pylint: disable=W0718
            if retry_count >= max_retries:
                logger.error(f"Task failed with {exc} after {max_retries} retries.")  # noqa pylint: disable=W1203
                return exc
            retry_count += 1
            sleep(retry_delay)
