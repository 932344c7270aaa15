// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Reference runner: executes a module's "main" export under V8 with the same host imports as
// rr-run, printing stdout and the exit status line "exit <code>" or "trap".
const fs = require('fs');
const bytes = fs.readFileSync(process.argv[2]);
let out = '';
class Exit { constructor(code) { this.code = code; } }
const imports = {
  host: {
    putc: (c) => { out += String.fromCharCode(c & 0xff); },
    print_i32: (v) => { out += `${v}\n`; },
    exit: (c) => { throw new Exit(c); },
  },
};
let status;
try {
  const inst = new WebAssembly.Instance(new WebAssembly.Module(bytes), imports);
  inst.exports.main();
  status = 'exit 0';
} catch (e) {
  status = e instanceof Exit ? `exit ${e.code}` : 'trap';
}
process.stdout.write(out);
process.stdout.write(status + '\n');
