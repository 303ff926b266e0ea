#!/usr/bin/env node
import { renameSync, writeFileSync } from 'node:fs';
import { parseArgs } from 'node:util';
import { loadTrace, parseInputSpec, SchemaError } from './csv.js';
import { buildOption, renderSvg } from './figure.js';

const USAGE =
  'usage: plot_traces --in trace.csv[:label] [--in ...] --out fig.svg [--log-y] [--stride k] [--title text]';

function fail(msg: string): never {
  console.error(msg);
  console.error(USAGE);
  process.exit(1);
}

/* write to a sibling temp file, then rename; never leaves a partial output */
function atomicWrite(path: string, content: string): void {
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, content);
  renameSync(tmp, path);
}

function main(argv: string[]): void {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        in: { type: 'string', multiple: true },
        out: { type: 'string' },
        'log-y': { type: 'boolean', default: false },
        stride: { type: 'string' },
        title: { type: 'string' },
        help: { type: 'boolean', short: 'h', default: false },
      },
    }));
  } catch (e) {
    fail((e as Error).message);
  }
  if (values.help) {
    console.log(USAGE);
    return;
  }
  const inputs = values.in ?? [];
  if (inputs.length === 0) {
    fail('at least one --in is required');
  }
  if (!values.out) {
    fail('--out is required');
  }
  let stride = 1;
  if (values.stride !== undefined) {
    stride = Number(values.stride);
    if (!Number.isInteger(stride) || stride < 1) {
      fail(`--stride must be a positive integer, got ${values.stride}`);
    }
  }

  let series;
  try {
    series = inputs.map((arg) => {
      const spec = parseInputSpec(arg);
      return loadTrace(spec.path, spec.label);
    });
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`schema mismatch: ${e.message}`);
      process.exit(1);
    }
    throw e;
  }
  for (const s of series) {
    if (s.slots.length === 0) {
      console.warn(`warning: ${s.label}: no data rows, plotting empty axes`);
    }
  }

  const option = buildOption({
    series,
    logY: values['log-y'],
    stride,
    title: values.title,
  });
  atomicWrite(values.out, renderSvg(option));
  console.log(`wrote ${values.out}`);
}

main(process.argv.slice(2));
