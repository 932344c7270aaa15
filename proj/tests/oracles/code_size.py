#!/usr/bin/env python3
# rr-reduce: execution-aware WebAssembly program reduction
# Copyright 2026 The rr-reduce Authors.
# SPDX-License-Identifier: Apache-2.0
"""Independent code-size dump: for each function body in the code section, prints
"<index> <size without the body's size prefix>" and finally "total <sum>"."""
import sys


def leb(buf, pos):
    result = shift = 0
    while True:
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        shift += 7
        if b < 0x80:
            return result, pos


def main(path):
    data = open(path, "rb").read()
    assert data[:4] == b"\0asm", "not a wasm module"
    pos = 8
    imported = 0
    total = 0
    while pos < len(data):
        sid = data[pos]
        size, body = leb(data, pos + 1)
        end = body + size
        if sid == 2:
            count, p = leb(data, body)
            for _ in range(count):
                for _ in range(2):
                    n, p = leb(data, p)
                    p += n
                kind = data[p]
                p += 1
                if kind == 0:
                    _, p = leb(data, p)
                    imported += 1
                elif kind == 1:
                    p += 1
                    flags = data[p]
                    _, p = leb(data, p + 1)
                    if flags & 1:
                        _, p = leb(data, p)
                elif kind == 2:
                    flags = data[p]
                    _, p = leb(data, p + 1)
                    if flags & 1:
                        _, p = leb(data, p)
                else:
                    p += 2
        if sid == 10:
            count, p = leb(data, body)
            for i in range(count):
                n, p = leb(data, p)
                print(imported + i, n)
                total += n
                p += n
        pos = end
    print("total", total)


if __name__ == "__main__":
    main(sys.argv[1])
