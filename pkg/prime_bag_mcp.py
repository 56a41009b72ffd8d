#!/usr/bin/env python3
"""
Prime-bag arithmetic MCP server

Exposes PB evaluation, conversion, factoring, ordering and partition
tables as MCP tools over stdio.

Optional environment variables (see settings.py for the full list):
    PRIME_BAG_WORK_CEILING - Pollard-rho step budget per conversion
    PRIME_BAG_LOG_LEVEL    - logging level (logs go to stderr)

Usage with an MCP client:
    Add to the client configuration:
    {
        "mcpServers": {
            "prime_bag": {
                "command": "/path/to/.venv/bin/python3",
                "args": ["/path/to/prime_bag_mcp.py"]
            }
        }
    }
"""

from __future__ import annotations

import asyncio
import json
import logging
from enum import Enum
from typing import Any

from mcp.server.fastmcp import FastMCP
from pydantic import BaseModel, ConfigDict, Field

from convert import ConversionReceipt, natural_to_pb, pb_to_rational, rational_to_pb
from errors import PrimeBagError, describe, exit_code_for
from expression import evaluate, require_mode
from order import partial_compare, signed_compare
from partition import partition_rows
from pbnum import NumberClass, PrimeBag, factor_pb, format_pb, is_natural, validate
from primes import nth_prime, prime_table
from prime_bag_cli import render_decimal
from settings import configure_logging, get_settings

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 10

# ---------------------------------------------------------------------------
# Server
# ---------------------------------------------------------------------------

mcp = FastMCP("prime_bag_mcp")


def _handle_error(e: Exception) -> str:
    """Turn a failure into the JSON error payload every tool returns."""
    if isinstance(e, PrimeBagError):
        payload = describe(e)
        payload["exit_code"] = exit_code_for(e)
        return json.dumps(payload)
    logger.exception("unexpected tool failure")
    return json.dumps({"error": f"Unexpected error: {type(e).__name__}: {e}", "exit_code": 1})


def _render(data: dict[str, Any], fmt: "ResponseFormat", title: str) -> str:
    if fmt == ResponseFormat.JSON:
        return json.dumps(data, indent=2, ensure_ascii=False)
    lines = [f"## {title}", ""]
    for key, value in data.items():
        if isinstance(value, list):
            lines.append(f"- **{key}**:")
            lines.extend(f"  - {item}" for item in value)
        else:
            lines.append(f"- **{key}**: {value}")
    return "\n".join(lines)


def _parse_value(text: str, receipt: ConversionReceipt) -> PrimeBag:
    text = text.strip()
    if "{" in text or text.lstrip("-").lstrip("i") == "inf":
        return validate(text)
    if "/" not in text and text.isdigit() and int(text) >= 1:
        return natural_to_pb(int(text), receipt)[0]
    return rational_to_pb(text, receipt)


# ---------------------------------------------------------------------------
# Input Models
# ---------------------------------------------------------------------------


class ResponseFormat(str, Enum):
    """Output format for tool responses."""
    MARKDOWN = "markdown"
    JSON = "json"


class EvalInput(BaseModel):
    """Input for evaluating a PB expression."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    expression: str = Field(
        ...,
        description="PB expression, e.g. '{1} * {2}', '{2,1} / {-3}', '{1,1}^(1/2)', '{2} + {1}'",
        min_length=1,
        max_length=10_000,
    )
    mode: NumberClass = Field(
        default=NumberClass.EXTENDED,
        description="Number system: 'natural', 'rational' or 'extended'",
    )
    digits: int = Field(default=DEFAULT_DIGITS, description="Decimal digits shown", ge=0, le=10_000)
    response_format: ResponseFormat = Field(
        default=ResponseFormat.MARKDOWN,
        description="Output format: 'markdown' for readable text, 'json' for structured data",
    )


class ValueInput(BaseModel):
    """Input holding a single PB literal, natural or fraction."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    value: str = Field(
        ...,
        description="A PB literal such as '{2,1,-3}', a natural such as '40', or a fraction such as '2/9'",
        min_length=1,
        max_length=10_000,
    )
    digits: int = Field(default=DEFAULT_DIGITS, description="Decimal digits shown", ge=0, le=10_000)
    response_format: ResponseFormat = Field(
        default=ResponseFormat.MARKDOWN,
        description="Output format: 'markdown' for readable text, 'json' for structured data",
    )


class CompareInput(BaseModel):
    """Input for ordering two PBs."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    a: str = Field(..., description="First PB literal or number", min_length=1, max_length=10_000)
    b: str = Field(..., description="Second PB literal or number", min_length=1, max_length=10_000)
    response_format: ResponseFormat = Field(
        default=ResponseFormat.MARKDOWN,
        description="Output format: 'markdown' for readable text, 'json' for structured data",
    )


class PartitionsInput(BaseModel):
    """Input for the weight-n partition table."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    weight: int = Field(..., description="Number of brace pairs n", ge=0, le=200)
    response_format: ResponseFormat = Field(
        default=ResponseFormat.MARKDOWN,
        description="Output format: 'markdown' for readable text, 'json' for structured data",
    )


# ---------------------------------------------------------------------------
# Tools
# ---------------------------------------------------------------------------


def _eval(params: EvalInput) -> dict[str, Any]:
    result = evaluate(params.expression, params.mode)
    data: dict[str, Any] = {
        "pb": format_pb(result.value),
        "exact": None if result.exact is None else str(result.exact),
        "decimal": None if result.exact is None else render_decimal(result.exact, params.digits),
    }
    if result.receipt is not None:
        data["receipt"] = result.receipt.as_dict()
    if result.truncations:
        data["truncations"] = result.truncations
    return data


@mcp.tool(
    name="pb_eval",
    annotations={
        "title": "Evaluate a Prime-Bag Expression",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_eval(params: EvalInput) -> str:
    """Evaluate an infix expression over PB literals.

    ``*`` and ``/`` are bag union and difference, ``^`` takes a numeric
    exponent, ``+`` and ``-`` go through positional conversion and report
    their cost in a receipt.

    Args:
        params (EvalInput): Validated input containing:
            - expression (str): the expression
            - mode (str): 'natural', 'rational' or 'extended'
            - digits (int): decimal digits shown
            - response_format (str): 'markdown' or 'json'

    Returns:
        str: canonical PB, exact value and decimal expansion
    """
    try:
        data = await asyncio.to_thread(_eval, params)
        return _render(data, params.response_format, params.expression)
    except Exception as e:
        return _handle_error(e)


def _convert(params: ValueInput) -> dict[str, Any]:
    receipt = ConversionReceipt()
    text = params.value
    if "{" in text or text.lstrip("-").lstrip("i") == "inf":
        bag = validate(text)
        value = pb_to_rational(bag, receipt)
        return {
            "pb": format_pb(bag),
            "exact": str(value),
            "decimal": render_decimal(value, params.digits),
            "receipt": receipt.as_dict(),
        }
    bag = _parse_value(text, receipt)
    return {"value": text, "pb": format_pb(bag), "receipt": receipt.as_dict()}


@mcp.tool(
    name="pb_convert",
    annotations={
        "title": "Convert Between PB and Positional Form",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_convert(params: ValueInput) -> str:
    """Convert a natural or fraction to its PB, or a PB literal to its value.

    Returns:
        str: the counterpart representation plus the conversion receipt
    """
    try:
        data = await asyncio.to_thread(_convert, params)
        return _render(data, params.response_format, f"convert {params.value}")
    except Exception as e:
        return _handle_error(e)


def _factor(params: ValueInput) -> dict[str, Any]:
    receipt = ConversionReceipt()
    bag = require_mode(_parse_value(params.value, receipt), NumberClass.NATURAL)
    return {
        "pb": format_pb(bag),
        "factors": [
            {"index": k, "prime": nth_prime(k), "multiplicity": m} for k, m in factor_pb(bag)
        ],
    }


@mcp.tool(
    name="pb_factor",
    annotations={
        "title": "Factor a Natural PB",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_factor(params: ValueInput) -> str:
    """List the members of a natural PB as (index, prime, multiplicity).

    A PB literal is factored by reading it; a positional natural is
    factored (expensively) first.
    """
    try:
        data = await asyncio.to_thread(_factor, params)
        return _render(data, params.response_format, f"factor {params.value}")
    except Exception as e:
        return _handle_error(e)


def _compare(params: CompareInput) -> dict[str, Any]:
    receipt = ConversionReceipt()
    a, b = _parse_value(params.a, receipt), _parse_value(params.b, receipt)
    partial = partial_compare(a, b).value if is_natural(a) and is_natural(b) else "n/a"
    return {
        "a": format_pb(a),
        "b": format_pb(b),
        "partial": partial,
        "exact": signed_compare(a, b).value,
    }


@mcp.tool(
    name="pb_compare",
    annotations={
        "title": "Order Two PBs",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_compare(params: CompareInput) -> str:
    """Compare two PBs with the cheap structural rules and exactly."""
    try:
        data = await asyncio.to_thread(_compare, params)
        return _render(data, params.response_format, f"{params.a} vs {params.b}")
    except Exception as e:
        return _handle_error(e)


def _partitions(params: PartitionsInput) -> dict[str, Any]:
    rows = partition_rows(params.weight)
    return {
        "weight": params.weight,
        "count": len(rows),
        "rows": [
            f"{'+'.join(map(str, r.partition)) or '0'} | {format_pb(r.bag)} | {r.value}"
            + (" | prime" if r.prime else "")
            for r in rows
        ],
    }


@mcp.tool(
    name="pb_partitions",
    annotations={
        "title": "Partitions of n as Weight-n PBs",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_partitions(params: PartitionsInput) -> str:
    """Table of all natural PBs with n brace pairs, one per partition of n."""
    try:
        data = await asyncio.to_thread(_partitions, params)
        return _render(data, params.response_format, f"weight {params.weight}")
    except Exception as e:
        return _handle_error(e)


@mcp.tool(
    name="pb_status",
    annotations={
        "title": "Show Effective Settings",
        "readOnlyHint": True,
        "destructiveHint": False,
        "idempotentHint": True,
        "openWorldHint": False,
    },
)
async def pb_status() -> str:
    """Report the effective settings and the size of the prime cache.

    Returns:
        str: JSON with every setting and the cached prime count and limit.
    """
    table = prime_table()
    return json.dumps(
        {
            "settings": get_settings().model_dump(),
            "cached_primes": len(table),
            "sieve_limit": table.limit,
        },
        indent=2,
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

if __name__ == "__main__":
    configure_logging()
    mcp.run()
