// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Prints "valid" or "invalid" for each module path, one per line, using V8's validator.
const fs = require('fs');
for (const f of process.argv.slice(2)) {
  process.stdout.write((WebAssembly.validate(fs.readFileSync(f)) ? 'valid ' : 'invalid ') + f + '\n');
}
