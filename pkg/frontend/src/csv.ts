import { readFileSync } from 'node:fs';
import { basename } from 'node:path';
import Papa from 'papaparse';

/** Columns the simulator writes, in order. Plotting needs slot and max_queue. */
export const TRACE_COLUMNS = [
  'slot',
  'max_queue',
  'total_queue',
  'delivered_cum',
  'arrived_cum',
  'setqueue_or_s',
  'cur',
] as const;

export interface TraceSeries {
  label: string;
  slots: number[];
  maxQueue: number[];
}

export class SchemaError extends Error {}

export interface InputSpec {
  path: string;
  label?: string;
}

/** `trace.csv` or `trace.csv:my label`; the label follows the last colon. */
export function parseInputSpec(arg: string): InputSpec {
  const i = arg.lastIndexOf(':');
  if (i <= 0 || i === arg.length - 1) {
    return { path: arg };
  }
  return { path: arg.slice(0, i), label: arg.slice(i + 1) };
}

export function loadTrace(path: string, label?: string): TraceSeries {
  const text = readFileSync(path, 'utf8');
  const parsed = Papa.parse<Record<string, unknown>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  const missing = TRACE_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: missing column(s): ${missing.join(', ')}`);
  }
  const slots: number[] = [];
  const maxQueue: number[] = [];
  parsed.data.forEach((row, i) => {
    const slot = row.slot;
    const mq = row.max_queue;
    if (typeof slot !== 'number' || !Number.isFinite(slot)) {
      throw new SchemaError(`${path}: row ${i + 1}: non-numeric value in column slot`);
    }
    if (typeof mq !== 'number' || !Number.isFinite(mq)) {
      throw new SchemaError(`${path}: row ${i + 1}: non-numeric value in column max_queue`);
    }
    slots.push(slot);
    maxQueue.push(mq);
  });
  return {
    label: label ?? basename(path).replace(/\.csv$/i, ''),
    slots,
    maxQueue,
  };
}
