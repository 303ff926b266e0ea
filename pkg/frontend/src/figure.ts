import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';
import type { TraceSeries } from './csv.js';

export interface FigureSpec {
  series: TraceSeries[];
  logY?: boolean;
  stride?: number;
  title?: string;
}

/** Every stride-th element, always keeping the last one. stride 1 is identity. */
export function subsample<T>(xs: T[], stride: number): T[] {
  if (stride <= 1 || xs.length === 0) {
    return xs;
  }
  const out: T[] = [];
  for (let i = 0; i < xs.length; i += stride) {
    out.push(xs[i]);
  }
  if ((xs.length - 1) % stride !== 0) {
    out.push(xs[xs.length - 1]);
  }
  return out;
}

/**
 * One line per trace, max queue against slot. Points are the CSV values
 * verbatim; stride is the only resampling that ever happens.
 */
export function buildOption(spec: FigureSpec): EChartsOption {
  const stride = spec.stride ?? 1;
  return {
    animation: false,
    title: spec.title ? { text: spec.title, left: 'center' } : undefined,
    legend: { data: spec.series.map((s) => s.label), bottom: 0 },
    grid: { left: 70, right: 30, top: 40, bottom: 60 },
    xAxis: { type: 'value', name: 'slot', nameLocation: 'middle', nameGap: 28 },
    yAxis: {
      type: spec.logY ? 'log' : 'value',
      name: 'max queue',
      nameLocation: 'middle',
      nameGap: 50,
    },
    series: spec.series.map((s) => ({
      name: s.label,
      type: 'line' as const,
      showSymbol: false,
      data: subsample(
        s.slots.map((slot, i) => [slot, s.maxQueue[i]] as [number, number]),
        stride,
      ),
    })),
  };
}

export function renderSvg(option: EChartsOption, width = 900, height = 520): string {
  const chart = echarts.init(null, null, { renderer: 'svg', ssr: true, width, height });
  chart.setOption(option);
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}
