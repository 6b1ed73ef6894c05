import { indexResults, type ResultsIndex } from './types';

export async function loadResults(url: string): Promise<ResultsIndex> {
    const response = await fetch(url);
    if (!response.ok) {
        throw new Error(`failed to fetch ${url}: HTTP ${response.status}`);
    }
    return indexResults(await response.json());
}
